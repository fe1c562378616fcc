#![no_main]

use krr_cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

// Arbitrary input must produce a config or an error, never a panic. An
// accepted config must also expand into a grid.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_json(text) {
        let grid = cfg.grid().expect("validated config expands");
        assert!(!grid.is_empty());
    }
});
