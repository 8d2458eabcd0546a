#![no_main]

use invis_core::io::parse_sampled_field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(field) = parse_sampled_field(text) {
        let r = field.rect();
        let _ = field.value(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
    }
});
