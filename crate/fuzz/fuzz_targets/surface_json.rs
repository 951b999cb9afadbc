#![no_main]
use libfuzzer_sys::fuzz_target;
use laminath::translation_surface::SurfaceDocument;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(doc) = SurfaceDocument::from_json(s) else { return };
    if let Ok(surface) = doc.build() {
        let _ = surface.genus();
    }
});
