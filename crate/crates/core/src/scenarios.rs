//! Self-checking reports for the worked physics examples: a spin singlet
//! conditioned on one partner, post-selected teleportation, and two photon
//! pairs conditioned into a polarized product state.

use num_complex::Complex64;

use crate::cdm::{condition_probability, conditional, conditional_sandwiched, reduce};
use crate::error::Result;
use crate::qstate::{
    density, orthogonal_state, projector, singlet, spin_state, BlochVector, Sign, StateVector,
};
use crate::tensor::{kron, ComplexMatrix, DEFAULT_TOL};

/// Named scenario input.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Direction(BlochVector),
    Bits(String),
    Count(u64),
    Real(f64),
}

/// Named scenario output.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Matrix(ComplexMatrix),
    Vector(Vec<Complex64>),
    Scalar(f64),
    Bits(String),
    Counts(Vec<u64>),
    /// Pre-rendered JSON document, such as a protocol transcript.
    Document(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Algebraic identity, judged against the run tolerance.
    Exact,
    /// Sampled estimate with its own confidence band.
    Statistical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub description: String,
    pub residual: f64,
    pub tolerance: f64,
    pub kind: CheckKind,
    pub pass: bool,
}

impl Check {
    pub fn exact(description: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self::build(description.into(), residual, tolerance, CheckKind::Exact)
    }

    pub fn statistical(description: impl Into<String>, residual: f64, band: f64) -> Self {
        Self::build(description.into(), residual, band, CheckKind::Statistical)
    }

    fn build(description: String, residual: f64, tolerance: f64, kind: CheckKind) -> Self {
        let residual = residual.abs();
        Self {
            description,
            residual,
            tolerance,
            kind,
            pass: residual.is_finite() && residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub name: String,
    pub inputs: Vec<(String, Param)>,
    pub outputs: Vec<(String, Value)>,
    pub checks: Vec<Check>,
}

impl ScenarioReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn input(&mut self, name: &str, value: Param) {
        self.inputs.push((name.to_owned(), value));
    }

    pub fn output(&mut self, name: &str, value: Value) {
        self.outputs.push((name.to_owned(), value));
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Re-judges every exact check against `tol`.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        for check in self
            .checks
            .iter_mut()
            .filter(|c| c.kind == CheckKind::Exact)
        {
            *check = Check::exact(std::mem::take(&mut check.description), check.residual, tol);
        }
        self
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn find_output(&self, name: &str) -> Option<&Value> {
        self.outputs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn find_check(&self, prefix: &str) -> Option<&Check> {
        self.checks
            .iter()
            .find(|c| c.description.starts_with(prefix))
    }
}

fn half_identity() -> ComplexMatrix {
    ComplexMatrix::identity(2).scale_real(0.5)
}

/// Electron–positron singlet along `n`; the positron passes a filter along `m`.
pub fn parapositronium(n: &BlochVector, m: &BlochVector) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new("parapositronium");
    report.input("n", Param::Direction(*n));
    report.input("m", Param::Direction(*m));

    let rho = density(&singlet(n))?;
    let rho_e = reduce(&rho, &[0])?;
    report.check(Check::exact(
        "electron reduced state is E/2",
        rho_e.matrix().distance(&half_identity()),
        DEFAULT_TOL,
    ));

    let filter = projector(&spin_state(m, Sign::Plus))?;
    let cond = conditional(&rho, &filter, &[1])?;
    let opposite = projector(&spin_state(m, Sign::Minus))?;
    report.check(Check::exact(
        "conditional electron state is polarized along -m",
        cond.conditional.matrix().distance(opposite.matrix()),
        DEFAULT_TOL,
    ));
    report.check(Check::exact(
        "filter pass probability is 1/2",
        cond.probability - 0.5,
        DEFAULT_TOL,
    ));
    let independent = condition_probability(&rho, &filter, &[1])?;
    report.check(Check::exact(
        "probability matches Tr(P rho)",
        cond.probability - independent,
        DEFAULT_TOL,
    ));
    let sandwiched = conditional_sandwiched(&rho, &filter, &[1])?;
    report.check(Check::exact(
        "one-sided and sandwiched forms agree",
        cond.conditional
            .matrix()
            .distance(sandwiched.conditional.matrix()),
        DEFAULT_TOL,
    ));

    report.output("rho_e", Value::Matrix(rho_e.into_matrix()));
    report.output(
        "rho_e_given_p",
        Value::Matrix(cond.conditional.into_matrix()),
    );
    report.output("probability", Value::Scalar(cond.probability));
    Ok(report)
}

/// Intermediate vectors `φ(σ₁) = Σ₃ χ_m*(σ₃) χ(σ₁,σ₃)` and
/// `θ(σ₂) = Σ₁ φ*(σ₁) χ(σ₁,σ₂)` for a two-qubit pair state `chi`.
pub fn teleportation_vectors(
    chi: &StateVector,
    message: &StateVector,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let pair = chi.amplitudes();
    let msg = message.amplitudes();
    let phi: Vec<Complex64> = (0..2)
        .map(|s1| (0..2).map(|s3| msg[s3].conj() * pair[s1 * 2 + s3]).sum())
        .collect();
    let theta: Vec<Complex64> = (0..2)
        .map(|s2| (0..2).map(|s1| phi[s1].conj() * pair[s1 * 2 + s2]).sum())
        .collect();
    (phi, theta)
}

/// Photons 1, 2 in a singlet along `n`, photon 3 polarized along `m`;
/// photons 1 and 3 are post-selected onto the singlet.
pub fn teleportation(m: &BlochVector, n: &BlochVector) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new("teleportation");
    report.input("m", Param::Direction(*m));
    report.input("n", Param::Direction(*n));

    let chi = singlet(n);
    let chi_m = spin_state(m, Sign::Plus);
    let psi = chi.tensor(&chi_m);
    let rho = density(&psi)?;

    let rho_2 = reduce(&rho, &[1])?;
    report.check(Check::exact(
        "photon 2 alone is unpolarized",
        rho_2.matrix().distance(&half_identity()),
        DEFAULT_TOL,
    ));

    let (phi, theta) = teleportation_vectors(&chi, &chi_m);
    let theta_norm = theta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    report.check(Check::exact("|theta| = 1/2", theta_norm - 0.5, DEFAULT_TOL));
    let overlap: Complex64 = theta
        .iter()
        .zip(chi_m.amplitudes())
        .map(|(t, c)| t.conj() * c)
        .sum();
    report.check(Check::exact(
        "theta lies along chi_m",
        1.0 - overlap.norm() / theta_norm,
        DEFAULT_TOL,
    ));

    let bell = projector(&chi)?;
    let cond = conditional(&rho, &bell, &[0, 2])?;
    let target = projector(&chi_m)?;
    report.check(Check::exact(
        "conditional photon 2 state is polarized along m",
        cond.conditional.matrix().distance(target.matrix()),
        DEFAULT_TOL,
    ));
    let fidelity = cond.conditional.fidelity(&chi_m)?;
    report.check(Check::exact(
        "fidelity with chi_m is 1",
        fidelity - 1.0,
        DEFAULT_TOL,
    ));
    report.check(Check::exact(
        "post-selection probability is 1/4",
        cond.probability - 0.25,
        DEFAULT_TOL,
    ));
    report.check(Check::exact(
        "probability equals |theta|^2",
        cond.probability - theta_norm * theta_norm,
        DEFAULT_TOL,
    ));
    let independent = condition_probability(&rho, &bell, &[0, 2])?;
    report.check(Check::exact(
        "probability matches Tr(P rho)",
        cond.probability - independent,
        DEFAULT_TOL,
    ));

    report.output("rho_2", Value::Matrix(rho_2.into_matrix()));
    report.output("phi", Value::Vector(phi));
    report.output("theta", Value::Vector(theta));
    report.output(
        "rho_2_given_13",
        Value::Matrix(cond.conditional.into_matrix()),
    );
    report.output("fidelity", Value::Scalar(fidelity));
    report.output("probability", Value::Scalar(cond.probability));
    Ok(report)
}

/// Conditional state of photons (1, 3) when photons 2 and 4 of two singlet
/// pairs are found polarized along `m` and `s`.
pub fn four_photon_conditional(
    photon2: &StateVector,
    photon4: &StateVector,
) -> Result<crate::cdm::ConditionReport> {
    let pair = singlet(&BlochVector::Z);
    let rho = density(&pair.tensor(&pair))?;
    let condition = projector(&photon2.tensor(photon4))?;
    conditional(&rho, &condition, &[1, 3])
}

pub fn four_photon_pairs(m: &BlochVector, s: &BlochVector) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new("four-photon-pairs");
    report.input("m", Param::Direction(*m));
    report.input("s", Param::Direction(*s));

    let chi_m = spin_state(m, Sign::Plus);
    let chi_s = spin_state(s, Sign::Plus);
    let cond = four_photon_conditional(&chi_m, &chi_s)?;
    let rho_13 = &cond.conditional;

    report.check(Check::exact(
        "photons (1,3) are in a pure state",
        rho_13.purity() - 1.0,
        DEFAULT_TOL,
    ));
    let expected = kron(
        projector(&orthogonal_state(&chi_m)?)?.matrix(),
        projector(&orthogonal_state(&chi_s)?)?.matrix(),
    );
    report.check(Check::exact(
        "state factorizes into orthogonal polarizations",
        rho_13.matrix().distance(&expected),
        DEFAULT_TOL,
    ));
    report.check(Check::exact(
        "joint condition probability is 1/4",
        cond.probability - 0.25,
        DEFAULT_TOL,
    ));

    let pair = singlet(&BlochVector::Z);
    let rho = density(&pair.tensor(&pair))?;
    let joint = projector(&chi_m.tensor(&chi_s))?;
    let independent = condition_probability(&rho, &joint, &[1, 3])?;
    report.check(Check::exact(
        "probability matches Tr(P rho)",
        cond.probability - independent,
        DEFAULT_TOL,
    ));

    // photon 2 first, leaving factors (1, 3, 4); then photon 4, now at index 2
    let first = conditional(&rho, &projector(&chi_m)?, &[1])?;
    let second = conditional(&first.conditional, &projector(&chi_s)?, &[2])?;
    report.check(Check::exact(
        "sequential conditioning matches joint conditioning",
        second.conditional.matrix().distance(rho_13.matrix()),
        DEFAULT_TOL,
    ));

    report.output("rho_13", Value::Matrix(rho_13.matrix().clone()));
    report.output("purity", Value::Scalar(rho_13.purity()));
    report.output("probability", Value::Scalar(cond.probability));
    Ok(report)
}
