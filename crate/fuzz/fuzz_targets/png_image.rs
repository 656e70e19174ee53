#![no_main]

use libfuzzer_sys::fuzz_target;
use relaynet::imaging::IntensityImage;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = IntensityImage::from_png_bytes(data, 1.25) {
        let bytes = img.to_png_bytes().unwrap();
        assert_eq!(IntensityImage::from_png_bytes(&bytes, 1.25).unwrap(), img);
    }
});
