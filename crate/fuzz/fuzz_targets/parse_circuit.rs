#![no_main]

use libfuzzer_sys::fuzz_target;
use qboundary::io::{emit_circuit_string, parse_circuit_str};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_circuit_str(text) {
        // anything accepted must survive a round trip unchanged
        let emitted = emit_circuit_string(&c);
        let back = parse_circuit_str(&emitted).expect("emitted circuit parses");
        assert_eq!(back, c);
        assert_eq!(emit_circuit_string(&back), emitted);
    }
});
