#![no_main]

use invis_core::born::{AmplitudeTable, Method, Side};
use invis_core::empower::total_power_changes;
use invis_core::io::CsvTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(table) = CsvTable::parse(text) else { return };
    let Ok(left) = AmplitudeTable::from_table(&table, Side::Left, Method::Born, 6.0) else { return };
    let right = AmplitudeTable { side: Side::Right, ..left.clone() };
    let _ = total_power_changes(&left, &right);
});
