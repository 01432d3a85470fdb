#![no_main]

use libfuzzer_sys::fuzz_target;
use momentkit::ring::PolyTermJson;
use momentkit::{Polynomial, PrimeField, Rationals};

fuzz_target!(|data: &[u8]| {
    let Ok(terms) = serde_json::from_slice::<Vec<PolyTermJson>>(data) else { return };
    if let Ok(p) = Polynomial::from_json_terms(&Rationals, 3, &terms) {
        if let Ok(back) = p.to_json_terms(&Rationals) {
            assert_eq!(Polynomial::from_json_terms(&Rationals, 3, &back).unwrap(), p);
        }
    }
    let f5 = PrimeField::new(5).unwrap();
    if let Ok(p) = Polynomial::from_json_terms(&f5, 3, &terms) {
        let back = p.to_json_terms(&f5).unwrap();
        assert_eq!(Polynomial::from_json_terms(&f5, 3, &back).unwrap(), p);
    }
});
