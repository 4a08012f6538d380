//! JSON representations of the library's objects (`f64` only).
//!
//! Matrices are arrays of rows; an entry is either a real number or a pair
//! `[re, im]`. Generator indices of forms are 1-based in JSON.

use serde::{Deserialize, Serialize};

use crate::complex::{FiniteComplex, MetricFamily};
use crate::error::{Error, Result};
use crate::forms::{FormElement, FormMatrix};
use crate::linalg::CMatrix;
use crate::scalar::C;
use crate::vn::{Algebra, CommutantOp, Module};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for C<f64> {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(x) => C::new(x, 0.0),
            Entry::Complex([re, im]) => C::new(re, im),
        }
    }
}

pub type MatrixDto = Vec<Vec<Entry>>;

pub fn matrix_to_dto(m: &CMatrix<f64>) -> MatrixDto {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| Entry::Complex([m[(r, c)].re, m[(r, c)].im])).collect()).collect()
}

/// `cols` is needed when the matrix has no rows.
pub fn matrix_from_dto(d: &MatrixDto, cols: usize) -> Result<CMatrix<f64>> {
    let rows = d.len();
    if d.iter().any(|row| row.len() != cols) {
        return Err(Error::Parse(format!("ragged matrix or wrong width (expected {cols} columns)")));
    }
    CMatrix::from_vec(rows, cols, d.iter().flatten().map(|&e| e.into()).collect())
}

/// A matrix factor, written `[n, w]` or `{"size": n, "weight": w}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "FactorRepr", into = "(usize, f64)")]
pub struct FactorDto {
    pub size: usize,
    pub weight: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FactorRepr {
    Pair(usize, f64),
    Named { size: usize, weight: f64 },
}

impl From<FactorRepr> for FactorDto {
    fn from(r: FactorRepr) -> Self {
        match r {
            FactorRepr::Pair(size, weight) | FactorRepr::Named { size, weight } => Self { size, weight },
        }
    }
}

impl From<FactorDto> for (usize, f64) {
    fn from(f: FactorDto) -> Self {
        (f.size, f.weight)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDto {
    pub factors: Vec<FactorDto>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
}

impl AlgebraDto {
    pub fn to_algebra(&self) -> Result<Algebra<f64>> {
        let f: Vec<(usize, f64)> = self.factors.iter().map(|f| (f.size, f.weight)).collect();
        Algebra::new(&f, self.normalize)
    }

    pub fn from_algebra(a: &Algebra<f64>) -> Self {
        Self { factors: a.factors().iter().map(|f| FactorDto { size: f.size, weight: f.weight }).collect(), normalize: false }
    }
}

/// Commutant operator: one block per factor. `mults` gives the module of an
/// endomorphism; domain and codomain multiplicities otherwise default to the
/// block shapes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OpDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mults: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<Vec<usize>>,
    pub blocks: Vec<MatrixDto>,
}

impl OpDto {
    pub fn from_op(op: &CommutantOp<f64>) -> Self {
        let blocks = op.blocks().iter().map(matrix_to_dto).collect();
        if op.is_endomorphism() {
            return Self { mults: Some(op.domain().mults().to_vec()), blocks, ..Default::default() };
        }
        Self {
            mults: None,
            domain: Some(op.domain().mults().to_vec()),
            codomain: Some(op.codomain().mults().to_vec()),
            blocks,
        }
    }

    fn from_blocks(blocks: &[MatrixDto]) -> Self {
        Self { blocks: blocks.to_vec(), ..Default::default() }
    }

    pub fn to_op(&self, alg: &Algebra<f64>) -> Result<CommutantOp<f64>> {
        let domain = match (&self.domain, &self.mults) {
            (Some(d), _) | (None, Some(d)) => d.clone(),
            (None, None) => self.blocks.iter().map(|b| b.first().map_or(0, Vec::len)).collect(),
        };
        let codomain = match (&self.codomain, &self.mults) {
            (Some(c), _) | (None, Some(c)) => c.clone(),
            (None, None) => self.blocks.iter().map(Vec::len).collect(),
        };
        if domain.len() != self.blocks.len() {
            return Err(Error::Parse(format!("{} blocks for {} domain multiplicities", self.blocks.len(), domain.len())));
        }
        let blocks = self.blocks.iter().zip(&domain).map(|(b, &c)| matrix_from_dto(b, c)).collect::<Result<_>>()?;
        CommutantOp::new(&Module::new(alg, &domain)?, &Module::new(alg, &codomain)?, blocks)
    }

    /// Operator whose domain and codomain are the given modules.
    pub fn to_op_between(&self, dom: &Module<f64>, cod: &Module<f64>) -> Result<CommutantOp<f64>> {
        if self.blocks.len() != dom.mults().len() {
            return Err(Error::Parse(format!("{} blocks for {} factors", self.blocks.len(), dom.mults().len())));
        }
        let blocks = self.blocks.iter().zip(dom.mults()).map(|(b, &c)| matrix_from_dto(b, c)).collect::<Result<_>>()?;
        CommutantOp::new(dom, cod, blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MetricDto {
    /// `A_q(u) = exp(u B_q)`; one generator (list of blocks) per degree.
    Exp { generators: Vec<Vec<MatrixDto>> },
    /// `A_q(u) = e^{c_q u}`.
    Conformal { rates: Vec<f64> },
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDto {
    pub algebra: AlgebraDto,
    /// Multiplicities of each degree.
    pub degrees: Vec<Vec<usize>>,
    /// Blocks of each differential.
    pub diffs: Vec<Vec<MatrixDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricDto>,
}

impl ComplexDto {
    pub fn to_complex(&self) -> Result<FiniteComplex<f64>> {
        let alg = self.algebra.to_algebra()?;
        let modules = self.degrees.iter().map(|m| Module::new(&alg, m)).collect::<Result<Vec<_>>>()?;
        if self.diffs.len() + 1 != modules.len() {
            return Err(Error::InvalidComplex(format!("{} differentials for {} degrees", self.diffs.len(), modules.len())));
        }
        let diffs = self
            .diffs
            .iter()
            .enumerate()
            .map(|(q, blocks)| OpDto::from_blocks(blocks).to_op_between(&modules[q], &modules[q + 1]))
            .collect::<Result<Vec<_>>>()?;
        FiniteComplex::new(modules, diffs, self.label.unwrap_or(0))
    }

    /// The metric family; the identity family when none is given.
    pub fn to_family(&self, c: &FiniteComplex<f64>) -> Result<MetricFamily<f64>> {
        match &self.metric {
            None | Some(MetricDto::Identity) => Ok(MetricFamily::identity(c)),
            Some(MetricDto::Conformal { rates }) => MetricFamily::conformal(c, rates),
            Some(MetricDto::Exp { generators }) => {
                if generators.len() != c.num_degrees() {
                    return Err(Error::InvalidMetric(format!("{} generators for {} degrees", generators.len(), c.num_degrees())));
                }
                let gens = generators
                    .iter()
                    .zip(c.modules())
                    .map(|(g, m)| OpDto::from_blocks(g).to_op_between(m, m))
                    .collect::<Result<Vec<_>>>()?;
                MetricFamily::exp(c, gens)
            }
        }
    }

    pub fn from_complex(c: &FiniteComplex<f64>, mf: Option<&MetricFamily<f64>>) -> Self {
        Self {
            algebra: AlgebraDto::from_algebra(c.algebra()),
            degrees: c.modules().iter().map(|m| m.mults().to_vec()).collect(),
            diffs: c.diffs().iter().map(|d| d.blocks().iter().map(matrix_to_dto).collect()).collect(),
            label: Some(c.label()),
            metric: mf.and_then(MetricFamily::generators).map(|g| MetricDto::Exp {
                generators: g.iter().map(|b| b.blocks().iter().map(matrix_to_dto).collect()).collect(),
            }),
        }
    }
}

/// `{"algebra": …, "op": …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpInstance {
    pub algebra: AlgebraDto,
    pub op: OpDto,
}

/// `{"algebra": …, "metric": …, "map": …}`: the element of a metric and
/// optionally its image under an isomorphism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetLineInstance {
    pub algebra: AlgebraDto,
    pub metric: OpDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<OpDto>,
}

/// `{"algebra": …, "generators": [op, …], "relators": [[[j, ±1], …], …]}`,
/// with an optional second representation to compare against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyInstance {
    pub algebra: AlgebraDto,
    pub generators: Vec<OpDto>,
    #[serde(default)]
    pub relators: Vec<Vec<(usize, i32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<Vec<OpDto>>,
}

/// `{"e": complex, "f": complex}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeInstance {
    pub e: ComplexDto,
    pub f: ComplexDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDto {
    /// 1-based generator indices.
    pub subset: Vec<usize>,
    pub coeff: Entry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormMatrixDto {
    pub dim2n: usize,
    pub size: usize,
    /// Row-major entries, each a list of terms.
    pub entries: Vec<Vec<TermDto>>,
}

pub fn form_from_terms(dim2n: usize, terms: &[TermDto]) -> Result<FormElement<f64>> {
    let mut f = FormElement::zero(dim2n)?;
    for t in terms {
        if t.subset.contains(&0) {
            return Err(Error::Parse("form generators are numbered from 1".into()));
        }
        let idx: Vec<usize> = t.subset.iter().map(|i| i - 1).collect();
        f = f.add(&FormElement::monomial(dim2n, &idx, t.coeff.into())?)?;
    }
    Ok(f)
}

pub fn form_to_terms(f: &FormElement<f64>) -> Vec<TermDto> {
    f.terms()
        .into_iter()
        .map(|(s, c)| TermDto { subset: s.into_iter().map(|i| i + 1).collect(), coeff: Entry::Complex([c.re, c.im]) })
        .collect()
}

impl FormMatrixDto {
    pub fn to_matrix(&self) -> Result<FormMatrix<f64>> {
        let entries = self.entries.iter().map(|t| form_from_terms(self.dim2n, t)).collect::<Result<_>>()?;
        FormMatrix::new(self.dim2n, self.size, entries)
    }

    pub fn from_matrix(m: &FormMatrix<f64>) -> Self {
        Self { dim2n: m.dim2n(), size: m.size(), entries: m.entries().iter().map(form_to_terms).collect() }
    }
}

/// Input of the index density: `D`, `L`, `Tr_τ(Z)` and `r`; `C` and `x`
/// additionally select the heat kernel at `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityInstance {
    #[serde(rename = "D")]
    pub d: FormMatrixDto,
    #[serde(rename = "L")]
    pub l: FormMatrixDto,
    #[serde(default)]
    pub z_trace: f64,
    pub r: f64,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<FormMatrixDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
}

pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}
