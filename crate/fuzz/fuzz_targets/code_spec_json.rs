#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| parpolar::fuzz::code_spec_json(data));
