//! JSON data transfer types. Complex numbers are `[re, im]` pairs and
//! non-finite values are rejected when parsing.

use crate::cocycle::BlockCocycle;
use crate::diffmod::{DifferenceModule, GradedBlock, GradedModule};
use crate::exponents::Exponent;
use crate::matrix::Mat;
use crate::puiseux::{LaurentU, PuiseuxSeries};
use crate::series::Laurent;
use crate::{CMatrix, Error, Result, C64};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        if !re.is_finite() || !im.is_finite() {
            return Err(D::Error::custom("complex components must be finite"));
        }
        Ok(Cx(C64::new(re, im)))
    }
}

fn cx_vec(v: &[C64]) -> Vec<Cx> {
    v.iter().copied().map(Cx).collect()
}

fn c64_vec(v: &[Cx]) -> Vec<C64> {
    v.iter().map(|c| c.0).collect()
}

pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<Cx>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Cx(m[(i, j)])).collect())
        .collect()
}

pub fn matrix_from_json(rows: &[Vec<Cx>]) -> Result<CMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    if rows.iter().any(|x| x.len() != c) {
        return Err(Error::ShapeMismatch("ragged matrix".into()));
    }
    Ok(CMatrix::from_fn(r, c, |i, j| rows[i][j].0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub p: u32,
    pub v: i64,
    pub order: i64,
    pub coeffs: Vec<Cx>,
}

impl From<&PuiseuxSeries> for SeriesJson {
    fn from(x: &PuiseuxSeries) -> Self {
        Self {
            p: x.p(),
            v: x.val(),
            order: x.order(),
            coeffs: cx_vec(x.coeffs()),
        }
    }
}

impl SeriesJson {
    pub fn to_series(&self) -> Result<PuiseuxSeries> {
        PuiseuxSeries::new(self.p, self.v, c64_vec(&self.coeffs), self.order)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentUJson {
    pub v: i64,
    pub order: i64,
    pub coeffs: Vec<Cx>,
}

impl From<&LaurentU> for LaurentUJson {
    fn from(x: &LaurentU) -> Self {
        Self {
            v: x.val(),
            order: x.order(),
            coeffs: cx_vec(x.coeffs()),
        }
    }
}

impl LaurentUJson {
    pub fn to_laurent(&self) -> Result<LaurentU> {
        LaurentU::new(self.v, c64_vec(&self.coeffs), self.order)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentJson {
    pub p: u32,
    pub q: i64,
    pub c: Vec<Cx>,
}

impl From<&Exponent> for ExponentJson {
    fn from(x: &Exponent) -> Self {
        Self {
            p: x.p(),
            q: x.q(),
            c: cx_vec(x.c()),
        }
    }
}

impl ExponentJson {
    pub fn to_exponent(&self) -> Result<Exponent> {
        Exponent::new(self.p, self.q, c64_vec(&self.c))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockJson {
    pub exponent: ExponentJson,
    #[serde(rename = "G")]
    pub g: Vec<Vec<Cx>>,
}

impl From<&GradedBlock> for BlockJson {
    fn from(b: &GradedBlock) -> Self {
        Self {
            exponent: (&b.exponent).into(),
            g: matrix_to_json(&b.g),
        }
    }
}

impl BlockJson {
    pub fn to_block(&self) -> Result<GradedBlock> {
        GradedBlock::new(self.exponent.to_exponent()?, matrix_from_json(&self.g)?)
    }
}

/// Either an explicit matrix (`rank`, `p`, `matrix`) or graded block data
/// (`graded`, expanded to `order`). When both are present the graded data is
/// attached to the explicit matrix as metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<SeriesJson>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graded: Option<Vec<BlockJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i64>,
}

impl From<&DifferenceModule> for ModuleJson {
    fn from(m: &DifferenceModule) -> Self {
        Self {
            rank: Some(m.rank()),
            p: Some(m.p()),
            matrix: Some(
                m.matrix()
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(SeriesJson::from).collect())
                    .collect(),
            ),
            graded: m
                .meta()
                .map(|g| g.blocks.iter().map(BlockJson::from).collect()),
            order: None,
        }
    }
}

impl ModuleJson {
    pub fn graded_module(&self) -> Result<Option<GradedModule>> {
        self.graded
            .as_ref()
            .map(|bs| {
                let blocks = bs
                    .iter()
                    .map(|b| b.to_block())
                    .collect::<Result<Vec<_>>>()?;
                if blocks.is_empty() {
                    return Err(Error::InvalidInput("graded module without blocks".into()));
                }
                Ok(GradedModule { blocks })
            })
            .transpose()
    }

    /// Builds the module; `default_order` applies to graded data without an
    /// explicit `order`.
    pub fn to_module(&self, default_order: i64) -> Result<DifferenceModule> {
        let graded = self.graded_module()?;
        match (&self.matrix, graded) {
            (Some(rows), g) => {
                let entries = rows
                    .iter()
                    .map(|r| r.iter().map(|e| e.to_series()).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let m = DifferenceModule::new(Mat::from_rows(entries)?)?;
                if self.rank.is_some_and(|r| r != m.rank()) {
                    return Err(Error::ShapeMismatch(format!(
                        "declared rank {} but matrix is {}x{}",
                        self.rank.unwrap_or(0),
                        m.rank(),
                        m.rank()
                    )));
                }
                if self.p.is_some_and(|p| p % m.p() != 0) {
                    return Err(Error::InvalidInput(format!(
                        "declared p = {} incompatible with entry ramification {}",
                        self.p.unwrap_or(0),
                        m.p()
                    )));
                }
                let m = match self.p {
                    Some(p) if p != m.p() => m.lift_to(p),
                    _ => m,
                };
                match g {
                    Some(g) => m.with_meta(g),
                    None => Ok(m),
                }
            }
            (None, Some(g)) => g.to_module(self.order.unwrap_or(default_order)),
            (None, None) => Err(Error::InvalidInput(
                "module JSON needs \"matrix\" or \"graded\"".into(),
            )),
        }
    }
}

/// Stokes cocycle: exponents, arc and the nonzero `T(u)` blocks keyed `"i,j"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleJson {
    pub exponents: Vec<ExponentJson>,
    pub arc: [f64; 2],
    pub blocks: BTreeMap<String, Vec<Vec<LaurentUJson>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, rename = "G", skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Vec<Vec<Cx>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i64>,
}

fn block_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidInput(format!("block key {key:?} is not \"i,j\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

impl From<&BlockCocycle> for CocycleJson {
    fn from(t: &BlockCocycle) -> Self {
        let m = t.nblocks();
        let mut blocks = BTreeMap::new();
        for i in 0..m {
            for j in 0..m {
                let b = t.block(i, j);
                if b.iter().all(|e| e.is_zero()) {
                    continue;
                }
                let rows = b
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(LaurentUJson::from).collect())
                    .collect();
                blocks.insert(format!("{i},{j}"), rows);
            }
        }
        Self {
            exponents: t.exponents().iter().map(ExponentJson::from).collect(),
            arc: [t.arc().0, t.arc().1],
            blocks,
            sizes: Some(t.sizes().to_vec()),
            g: (!t.gmats().is_empty()).then(|| t.gmats().iter().map(matrix_to_json).collect()),
            order: Some(t.order()),
        }
    }
}

impl CocycleJson {
    /// Missing blocks are zero; `default_order` applies when neither `order`
    /// nor any block fixes the truncation.
    pub fn to_cocycle(&self, default_order: i64) -> Result<BlockCocycle> {
        let exps = self
            .exponents
            .iter()
            .map(|e| e.to_exponent())
            .collect::<Result<Vec<_>>>()?;
        let m = exps.len();
        let mut parsed = BTreeMap::new();
        for (key, rows) in &self.blocks {
            let (i, j) = block_key(key)?;
            if i >= m || j >= m {
                return Err(Error::ShapeMismatch(format!(
                    "block {key} outside {m} exponents"
                )));
            }
            let entries = rows
                .iter()
                .map(|r| r.iter().map(|e| e.to_laurent()).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            parsed.insert((i, j), Mat::from_rows(entries)?);
        }
        let sizes = match &self.sizes {
            Some(s) => s.clone(),
            None => (0..m)
                .map(|i| parsed.get(&(i, i)).map_or(1, |b| b.rows()))
                .collect(),
        };
        if sizes.len() != m {
            return Err(Error::ShapeMismatch(
                "one size per exponent required".into(),
            ));
        }
        let order = self.order.unwrap_or_else(|| {
            parsed
                .values()
                .flat_map(|b| b.iter().map(|e| e.order()))
                .min()
                .unwrap_or(default_order)
        });
        let total: usize = sizes.iter().sum();
        let proto = LaurentU(Laurent::zero(order));
        let mut mat = Mat::zeros(total, total, &proto);
        let off: Vec<usize> = sizes
            .iter()
            .scan(0, |acc, &n| {
                let o = *acc;
                *acc += n;
                Some(o)
            })
            .collect();
        for ((i, j), b) in parsed {
            if b.rows() != sizes[i] || b.cols() != sizes[j] {
                return Err(Error::ShapeMismatch(format!(
                    "block {i},{j} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    sizes[i],
                    sizes[j]
                )));
            }
            mat.set_block(off[i], off[j], &b);
        }
        let gmats = match &self.g {
            Some(gs) => gs
                .iter()
                .map(|g| matrix_from_json(g))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        BlockCocycle::new(sizes, exps, gmats, (self.arc[0], self.arc[1]), mat)
    }
}
