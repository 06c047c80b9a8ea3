//! Labels naming the result that justifies each report flag and trace step.

pub const STANDING_ASSUMPTION: &str = "standing assumption: dim M1 + dim M2 ≥ 5";
pub const SCALAR_FACTOR: &str = "free product with ℂ";
pub const TWO_PROJECTIONS: &str = "two free projections: corner atoms";
pub const TWO_PROJECTIONS_DIFFUSE: &str = "two free projections: L^∞(0,1)⊗M₂(ℂ) part";
pub const DECOMPOSITION: &str = "structure theorem: M = M_d ⊕ M_c";
pub const MAXIMIZER: &str = "structure theorem: maximal one-dimensional summand";
pub const DISCRETE_CONDITION: &str = "structure theorem: survival condition Σ 1/λ < 1/(1−φ(p))";
pub const DISCRETE_PART: &str = "structure theorem: discrete part";
pub const DISCRETE_WEIGHTS: &str = "structure theorem: entry weights λ_s(1 − (1−φ(p)) Σ 1/λ)";
pub const NO_DISCRETE_PART: &str = "structure theorem: otherwise M_d = 0";
pub const T_SET: &str = "structure theorem: T-set of M_c";
pub const FULL: &str = "structure theorem: M_c is full";
pub const ASYMPTOTIC_CENTRALIZER: &str = "structure theorem: (M_c)_ω = ℂ";
pub const MAX_ABOVE_HALF: &str = "atoms require φ(p) > 1/2";
pub const DIM_BOUND: &str = "surviving blocks have dim ≤ 1/(1−φ(p))";
pub const ERGODIC: &str = "centralizer ergodicity for atomic inputs";
pub const AMENABLE: &str = "amenability only for dim M1 = dim M2 = 2";
pub const PRIME: &str = "primeness of M_c";
pub const NO_CARTAN: &str = "absence of Cartan subalgebras";
pub const CASE_2II: &str = "corner-mass identity for the compressed product";
pub const ALMOST_PERIODIC: &str = "almost periodic inputs, proof announced separately";
pub const NO_TYPE_III0: &str = "no type III₀ factor arises";
