//! Replays the checked-in fuzz seeds through the decoders they target.

use std::path::PathBuf;

use relaynet::cnn_runtime::{CnnError, ModelWeights};
use relaynet::imaging::IntensityImage;
use relaynet::pipeline::{parse_tasks_csv, write_tasks_csv, DatasetSample};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn weights_seeds() {
    for (name, data) in seeds("weights_decode") {
        match (name.as_str(), ModelWeights::from_bytes(&data)) {
            ("bad_magic", r) => assert!(matches!(r, Err(CnnError::Format(_))), "{name}"),
            ("eleven_layers", r) => assert!(r.is_err(), "{name}"),
            (_, Err(CnnError::Truncated { needed, available, .. })) => assert!(needed > available, "{name}"),
            (_, Ok(w)) => assert_eq!(w.to_bytes(), data),
            (_, Err(e)) => panic!("{name}: {e}"),
        }
    }
}

#[test]
fn manifest_seeds() {
    for (name, data) in seeds("manifest_record") {
        let line = std::str::from_utf8(&data).unwrap();
        let s = DatasetSample::from_json_line(line).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(DatasetSample::from_json_line(&s.to_json_line().unwrap()).unwrap(), s);
    }
}

#[test]
fn tasks_csv_seeds() {
    for (name, data) in seeds("tasks_csv") {
        let points = parse_tasks_csv(data.as_slice()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!points.is_empty());
        let mut buf = Vec::new();
        write_tasks_csv(&mut buf, &points).unwrap();
        assert_eq!(parse_tasks_csv(buf.as_slice()).unwrap(), points);
    }
}

#[test]
fn png_seeds() {
    for (name, data) in seeds("png_image") {
        let img = IntensityImage::from_png_bytes(&data, 1.25).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = IntensityImage::from_png_bytes(&img.to_png_bytes().unwrap(), 1.25).unwrap();
        assert_eq!(again, img);
    }
}
