#![no_main]

use libfuzzer_sys::fuzz_target;
use momentkit::sheaf::SheafData;
use momentkit::{PrimeField, Rationals};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(sheaf) = SheafData::from_json(s, &Rationals) {
        let text = sheaf.to_json().unwrap();
        assert_eq!(SheafData::from_json(&text, &Rationals).unwrap(), sheaf);
    }
    if let Ok(sheaf) = SheafData::from_json(s, &PrimeField::new(3).unwrap()) {
        let _ = sheaf.to_json().unwrap();
    }
});
