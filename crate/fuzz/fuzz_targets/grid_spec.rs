#![no_main]

use libfuzzer_sys::fuzz_target;
use mginf::parse::GridSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = text.parse::<GridSpec>() {
            assert!(grid
                .rho
                .iter()
                .chain(&grid.lambda)
                .all(|x| *x > 0.0 && x.is_finite()));
            let again: GridSpec = grid.to_string().parse().expect("display output parses");
            assert_eq!(again, grid);
        }
    }
});
