#![no_main]

use libfuzzer_sys::fuzz_target;
use relaynet::pipeline::{parse_tasks_csv, write_tasks_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(points) = parse_tasks_csv(data) {
        let mut buf = Vec::new();
        write_tasks_csv(&mut buf, &points).unwrap();
        assert_eq!(parse_tasks_csv(buf.as_slice()).unwrap(), points);
    }
});
