#![no_main]
use libfuzzer_sys::fuzz_target;

use cvc::io::parse_csv_dataset;

// First line picks the response column; the rest is the CSV body.
fuzz_target!(|data: &[u8]| {
    let split = data.iter().position(|&b| b == b'\n').unwrap_or(data.len());
    let Ok(selector) = std::str::from_utf8(&data[..split]) else {
        return;
    };
    let body = data.get(split + 1..).unwrap_or(&[]);
    if let Ok(ds) = parse_csv_dataset(body, selector) {
        assert_eq!(ds.x.nrows(), ds.y.len());
        assert_eq!(ds.x.ncols(), ds.feature_names.len());
        assert!(ds.x.iter().chain(ds.y.iter()).all(|v| v.is_finite()));
    }
});
