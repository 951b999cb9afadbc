#![no_main]
use libfuzzer_sys::fuzz_target;
use laminath::Quad;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 256 {
        return;
    }
    if let Ok(q) = s.parse::<Quad>() {
        let back: Quad = q.to_string().parse().expect("display output parses");
        assert_eq!(back, q);
    }
});
