#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(setup) = absorbctl::parse_config(text, &[]) {
            let _ = setup.build_model().and_then(|m| setup.initial_data(&m.plant));
        }
    }
});
