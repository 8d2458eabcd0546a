#![no_main]

use invis_core::io::parse_envelope_table;
use invis_core::numcore::Envelope;
use invis_core::Complex64;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(samples) = parse_envelope_table(text) {
        if let Ok(env) = Envelope::tabulated(Complex64::new(1.0, 0.0), &samples) {
            let (lo, hi) = env.support();
            let _ = env.value(0.5 * (lo + hi));
            let _ = env.second_derivative(lo);
        }
    }
});
