#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = absorbctl::parse_override(text);
        let overrides: Vec<String> = text.lines().map(str::to_owned).collect();
        let _ = absorbctl::parse_config("", &overrides);
    }
});
