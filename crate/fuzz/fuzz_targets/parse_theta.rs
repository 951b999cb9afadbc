#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 256 {
        return;
    }
    if let Ok(cf) = laminath::ContinuedFraction::parse(s) {
        let _ = cf.convergents(8);
        let _ = laminath::ContinuedFraction::parse(&cf.to_string());
    }
});
