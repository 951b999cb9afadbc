#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(f) = laminath::QuadField::parse(s) {
            assert_eq!(laminath::QuadField::parse(&f.to_string()).unwrap(), f);
        }
    }
});
