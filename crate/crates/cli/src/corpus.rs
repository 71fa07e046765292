//! Job files shipped with the binary.

pub const CORPUS: &[(&str, &str)] = &[
    ("minimal", include_str!("../jobs/minimal.job")),
    ("eigencurve", include_str!("../jobs/eigencurve.job")),
    ("locus", include_str!("../jobs/locus.job")),
    ("frobenius", include_str!("../jobs/frobenius.job")),
    ("artinian", include_str!("../jobs/artinian.job")),
    ("rank3", include_str!("../jobs/rank3.job")),
];

pub fn get(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
