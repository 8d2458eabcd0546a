#![no_main]

use invis_core::xfermat::TransferOperator;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(op) = TransferOperator::from_json(text) {
        if op.grid().len() <= 16 {
            let _ = op.extract_all();
        }
    }
});
