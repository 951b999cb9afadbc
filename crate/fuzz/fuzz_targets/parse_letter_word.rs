#![no_main]
use libfuzzer_sys::fuzz_target;
use laminath::torus_words::LetterWord;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(w) = s.parse::<LetterWord>() {
        let back: LetterWord = w.to_string().parse().expect("display output parses");
        assert_eq!(back, w);
    }
});
