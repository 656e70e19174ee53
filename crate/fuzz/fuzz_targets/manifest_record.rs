#![no_main]

use libfuzzer_sys::fuzz_target;
use relaynet::pipeline::DatasetSample;

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = DatasetSample::from_json_line(line) {
        let again = DatasetSample::from_json_line(&s.to_json_line().unwrap()).unwrap();
        assert_eq!(s, again);
    }
});
