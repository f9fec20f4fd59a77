#![no_main]

use libfuzzer_sys::fuzz_target;
use parpolar_cli::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_json(text) {
        assert_eq!(
            ExperimentConfig::from_json(&cfg.to_json()).expect("re-parse"),
            cfg
        );
        let _ = cfg.power_points();
    }
});
