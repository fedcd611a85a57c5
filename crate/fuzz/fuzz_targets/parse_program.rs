#![no_main]

use libfuzzer_sys::fuzz_target;
use qboundary::io::{hybrid_program_to_string, parse_program_str};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_program_str(text) {
        let emitted = hybrid_program_to_string(&p);
        let back = parse_program_str(&emitted).expect("emitted program parses");
        assert_eq!(hybrid_program_to_string(&back), emitted);
    }
});
