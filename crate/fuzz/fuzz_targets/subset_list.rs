#![no_main]
use libfuzzer_sys::fuzz_target;

use cvc::io::parse_subset_list;

fuzz_target!(|data: &str| {
    let names: Vec<String> = ["x1", "x2", "x3", "age"].iter().map(|s| s.to_string()).collect();
    if let Ok(subsets) = parse_subset_list(data, &names, Some("y")) {
        for s in subsets {
            assert!(s.iter().all(|&j| j < names.len()));
        }
    }
});
