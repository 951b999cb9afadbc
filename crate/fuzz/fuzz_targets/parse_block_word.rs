#![no_main]
use libfuzzer_sys::fuzz_target;
use laminath::torus_words::BlockWord;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(w) = s.parse::<BlockWord>() {
        let back: BlockWord = w.to_string().parse().expect("display output parses");
        assert_eq!(back, w);
    }
});
