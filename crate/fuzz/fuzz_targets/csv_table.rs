#![no_main]

use invis_core::io::CsvTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = CsvTable::parse(text) {
        // Anything accepted must survive a write/read cycle unchanged.
        if table.header.iter().all(|h| !h.contains(['\n', '\r', '"', '#']) && h.trim() == h) {
            let again = CsvTable::parse(&table.to_csv()).expect("re-parse of written table");
            assert_eq!(again.rows, table.rows);
        }
    }
});
