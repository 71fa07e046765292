//! `explain <anchor>`: what an operation computes and which function backs it.

pub struct Entry {
    pub anchor: &'static str,
    pub function: &'static str,
    pub statement: &'static str,
    pub certificate: &'static str,
}

pub const ENTRIES: &[Entry] = &[
    Entry {
        anchor: "solve",
        function: "hahn::solve_frobenius",
        statement: "Solves φ(b) − α·b = a for |α^{-1}| < 1 in generalized power series with rational exponents; the solution is unique when it exists.",
        certificate: "w_r(residual) >= N and w_r(b) >= w_r(a) − C(r, α), C = max(C_1, C_2).",
    },
    Entry {
        anchor: "criterion",
        function: "hahn::criterion_check",
        statement: "Obstruction at a negative exponent i: Σ_m α^{−(m+1)} φ^m(a_{i p^{−m}}). The equation is solvable iff all vanish.",
        certificate: "Values of valuation >= N count as zero and are listed separately.",
    },
    Entry {
        anchor: "localize",
        function: "robba::iota / robba::Localizer",
        statement: "ι_n: Robba ring on an annulus containing r_n to K_n[[t]]/(t^k), K_n = Q_p(ε_n), T ↦ ε_n·exp(t/p^n) − 1.",
        certificate: "Exact for polynomial input over exact rationals; per-coefficient floors otherwise.",
    },
    Entry {
        anchor: "sen",
        function: "phigamma::PhiGammaModule::sen",
        statement: "Sen operator Θ on D ⊗ K_n modulo t, its characteristic polynomial, Q(T) with P_Sen = T·Q(T), and P(k) = Π_{j<k} Q(−j).",
        certificate: "Descent and commutation valuations against N − 2.",
    },
    Entry {
        anchor: "descent",
        function: "phigamma::DifModule::descent",
        statement: "Compares Γ-invariants of D_dif^{+,n}/(t^k) with those modulo t: an isomorphism when P(k) is a unit, kernel and cokernel killed by P(k) in general.",
        certificate: "Kernel and cokernel dimensions with the annihilation checks.",
    },
    Entry {
        anchor: "period",
        function: "periods::solve_period",
        statement: "Vectors x of D with φ(x) = δ(p)·x and γ(x) = δ(χ(γ))·x, bracketed between a formal lower bound and an injectivity upper bound at level n modulo t^k.",
        certificate: "Residual floor of φ, γ_0 and ω against N − 2; certified when the bracket closes.",
    },
    Entry {
        anchor: "saturation",
        function: "periods::saturation_test",
        statement: "An eigenvector generates a saturated line iff it is nonzero modulo t after localization; reports the t-order.",
        certificate: "t-order read at tolerance N − 2.",
    },
    Entry {
        anchor: "finite_slope",
        function: "periods::finite_slope_test",
        statement: "Over an artinian base: the (φ = α, Γ = 1)-eigenspace maps isomorphically onto the Γ-invariants of the localization modulo t^k.",
        certificate: "Dimensions of both sides and a witness when surjectivity fails.",
    },
    Entry {
        anchor: "refinement",
        function: "triang::FilteredPhiModule::refinement",
        statement: "A φ-stable flag from an ordering of the eigenvalues; noncritical when transverse to the Hodge filtration, regular when partial products are simple on wedge powers.",
        certificate: "Exact linear algebra over Q_p.",
    },
    Entry {
        anchor: "parameters",
        function: "triang::refinement_parameters / triang::family_parameters",
        statement: "δ_i(p) = φ_i·p^{−s_i}, weight −s_i, with s_i the jumps induced by the flag; family parameters use the sorted jumps k_i instead.",
        certificate: "Exact.",
    },
    Entry {
        anchor: "chain",
        function: "triang::chain_test",
        statement: "m_i in the i-th wedge power form a chain iff each m_i is a saturated eigenvector and m_i ∧ m_j vanishes in the successive quotients.",
        certificate: "Eigen residual floors per step and the failing step with its kind.",
    },
    Entry {
        anchor: "triangulate",
        function: "triang::extract_triangulation",
        statement: "From a chain, the flag f_1 ⊂ … ⊂ f_d and parameters δ_i = Δ_i/Δ_{i−1}; checks the flag is Γ-stable.",
        certificate: "Chain certificates plus the stability check.",
    },
    Entry {
        anchor: "locus",
        function: "triang::locus_scan",
        statement: "Per sample point: the sufficient criterion P_i(k_i) ≠ 0, direct saturation tests of each Δ_i-line, and the chain test.",
        certificate: "Per-point table; the criterion is reported separately from the direct test.",
    },
];

pub fn lookup(anchor: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.anchor == anchor)
}

pub fn render(e: &Entry) -> String {
    format!("{}\n  function: {}\n  computes: {}\n  certificate: {}\n", e.anchor, e.function, e.statement, e.certificate)
}

pub fn anchors() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.anchor).collect()
}
