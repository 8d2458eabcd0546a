#![no_main]

use invis_cli::config::{from_entries, parse_config};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(entries) = parse_config(text) {
        if let Ok(cfg) = from_entries(entries) {
            let _ = cfg.validate();
        }
    }
});
