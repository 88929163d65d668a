#![no_main]
use libfuzzer_sys::fuzz_target;

use cvc::io::resolve_column;

fuzz_target!(|data: &str| {
    let mut parts = data.split('\n');
    let selector = parts.next().unwrap_or("");
    let headers: Vec<String> = parts.map(str::to_string).collect();
    if let Ok(i) = resolve_column(&headers, selector) {
        assert!(i < headers.len());
    }
});
