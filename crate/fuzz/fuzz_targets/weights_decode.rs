#![no_main]

use libfuzzer_sys::fuzz_target;
use relaynet::cnn_runtime::ModelWeights;

fuzz_target!(|data: &[u8]| {
    if let Ok(w) = ModelWeights::from_bytes(data) {
        assert_eq!(w.to_bytes(), data);
    }
});
