#![no_main]

use krr_cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = ExperimentConfig::from_json(text) else {
        return;
    };
    let json = cfg.to_json().expect("serializable");
    let back = ExperimentConfig::from_json(&json).expect("re-parses");
    assert_eq!(back, cfg);
});
