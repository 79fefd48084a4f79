#![no_main]

use libfuzzer_sys::fuzz_target;
use mginf::parse::DistSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = text.parse::<DistSpec>() else {
        return;
    };
    // canonical form must parse back to the same spec
    let again: DistSpec = spec.to_string().parse().expect("display output parses");
    assert_eq!(again, spec);

    for (lambda, rho) in [
        (None, None),
        (Some(1.0), None),
        (None, Some(2.0)),
        (Some(0.5), Some(1.5)),
    ] {
        if let Ok((d, q)) = spec.resolve(lambda, rho) {
            assert!((d.mean() - q.alpha()).abs() <= 1e-9 * q.alpha());
            let _ = d.cdf(q.alpha());
        }
    }
});
