#![no_main]

use krr_cli::DemoTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(table) = text.parse::<DemoTable>() {
        assert_eq!(table.to_string().parse::<DemoTable>(), Ok(table));
    }
});
