//! Finite-dimensional tensor semantics for reductions.
//!
//! Each atom gets a real vector space; a word of type `p1 ... pk` is a
//! dense tensor with one axis per simple type. A reduction witness is read
//! as a tensor network: every link is an inner product (ε) between two
//! axes, and the residue axes are what is left.
//!
//! Translation components act on axes by parity of the exponent: even
//! exponents use the component matrix `A`, odd ones its inverse transpose,
//! so every linked pair `<A^-T u, A v>` keeps its value.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reduction::{ReductionWitness, WitnessError};
use crate::translate::{FunctorMode, FunctorSpec, TypeMorphism};
use crate::types::{parse_compound, Atom, AtomTable, CompoundType, SimpleType};

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("tensor data has {data} entries but shape {shape:?} needs {expected}")]
    DataLength {
        shape: Vec<usize>,
        data: usize,
        expected: usize,
    },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("axis {axis} out of range for a rank {rank} tensor")]
    Axis { axis: usize, rank: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("no dimension assigned to atom {0}")]
    MissingDimension(String),
    #[error("atom {0} has dimension 0")]
    ZeroDimension(String),
    #[error("{lesser} <= {greater} but their dimensions differ ({dl} vs {dg})")]
    OrderedDimensions {
        lesser: String,
        greater: String,
        dl: usize,
        dg: usize,
    },
    #[error("no component for atom {0}")]
    MissingComponent(String),
    #[error("component for atom {0} is not invertible")]
    NotInvertible(String),
    #[error("witness does not fit the word tensors: {0}")]
    Witness(#[from] WitnessError),
    #[error("witness covers {witness} positions but the tensors have {types}")]
    WitnessLength { witness: usize, types: usize },
    #[error("link order must be a permutation of the links")]
    LinkOrder,
    #[error("witnesses do not correspond under the functor: {0}")]
    Structure(String),
    #[error("naturality check needs a homomorphism or antihomomorphism, got {0}")]
    Unsupported(&'static str),
    #[error("functor: {0}")]
    Translate(String),
    #[error("non-finite entry in tensor for {0}")]
    NonFinite(String),
    #[error("no tensor for word {word:?} at type {ty}")]
    MissingWord { word: String, ty: String },
    #[error("{origin}: {message}")]
    Fixture { origin: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

type Result<T> = std::result::Result<T, SemanticsError>;

/// Dense real tensor stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

/// Steps a multi-index in row-major order; false once it wraps around.
fn step(index: &mut [usize], shape: &[usize]) -> bool {
    for i in (0..index.len()).rev() {
        index[i] += 1;
        if index[i] < shape[i] {
            return true;
        }
        index[i] = 0;
    }
    false
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expected = shape.iter().product::<usize>();
        if data.len() != expected {
            return Err(SemanticsError::DataLength {
                shape,
                data: data.len(),
                expected,
            });
        }
        Ok(Tensor { shape, data })
    }

    pub fn scalar(x: f64) -> Self {
        Tensor {
            shape: Vec::new(),
            data: vec![x],
        }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape,
            data: vec![0.0; n],
        }
    }

    pub fn vector(data: Vec<f64>) -> Self {
        Tensor {
            shape: vec![data.len()],
            data,
        }
    }

    /// Reads nested JSON arrays of numbers; a bare number is a scalar.
    pub fn from_nested(value: &serde_json::Value) -> std::result::Result<Self, String> {
        fn walk(
            v: &serde_json::Value,
            depth: usize,
            shape: &mut Vec<usize>,
            data: &mut Vec<f64>,
        ) -> std::result::Result<(), String> {
            match v {
                serde_json::Value::Number(n) => {
                    if depth != shape.len() {
                        return Err("ragged nesting".into());
                    }
                    data.push(n.as_f64().ok_or("number out of range")?);
                    Ok(())
                }
                serde_json::Value::Array(items) => {
                    if depth == shape.len() {
                        if !data.is_empty() {
                            return Err("ragged nesting".into());
                        }
                        shape.push(items.len());
                    } else if shape[depth] != items.len() {
                        return Err(format!(
                            "ragged nesting: axis {depth} has lengths {} and {}",
                            shape[depth],
                            items.len()
                        ));
                    }
                    items.iter().try_for_each(|item| walk(item, depth + 1, shape, data))
                }
                other => Err(format!("expected number or array, found {other}")),
            }
        }
        let mut shape = Vec::new();
        let mut data = Vec::new();
        walk(value, 0, &mut shape, &mut data)?;
        Tensor::new(shape, data).map_err(|e| e.to_string())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    /// The single entry of a rank-0 tensor.
    pub fn as_scalar(&self) -> Option<f64> {
        self.shape.is_empty().then(|| self.data[0])
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        let offset: usize = index.iter().zip(strides(&self.shape)).map(|(i, s)| i * s).sum();
        self.data[offset]
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.rank() {
            Ok(())
        } else {
            Err(SemanticsError::Axis {
                axis,
                rank: self.rank(),
            })
        }
    }

    /// New axis `i` is old axis `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor> {
        let mut seen = vec![false; self.rank()];
        if perm.len() != self.rank() || perm.iter().any(|&p| p >= self.rank() || std::mem::replace(&mut seen[p], true)) {
            return Err(SemanticsError::Shape(format!(
                "{perm:?} is not a permutation of {} axes",
                self.rank()
            )));
        }
        let old = strides(&self.shape);
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        if !self.data.is_empty() {
            let mut index = vec![0; shape.len()];
            loop {
                let offset: usize = index.iter().zip(perm).map(|(i, &p)| i * old[p]).sum();
                data.push(self.data[offset]);
                if !step(&mut index, &shape) {
                    break;
                }
            }
        }
        Ok(Tensor { shape, data })
    }

    fn move_axis_last(&self, axis: usize) -> Result<Tensor> {
        let mut perm: Vec<usize> = (0..self.rank()).filter(|&a| a != axis).collect();
        perm.push(axis);
        self.permute(&perm)
    }

    pub fn outer(&self, other: &Tensor) -> Tensor {
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&other.shape);
        let data = self
            .data
            .iter()
            .flat_map(|a| other.data.iter().map(move |b| a * b))
            .collect();
        Tensor { shape, data }
    }

    /// Contracts axis `a` of `self` with axis `b` of `other`. The result
    /// keeps the remaining axes of `self`, then those of `other`.
    pub fn tensordot(&self, a: usize, other: &Tensor, b: usize) -> Result<Tensor> {
        self.check_axis(a)?;
        other.check_axis(b)?;
        let n = self.shape[a];
        if other.shape[b] != n {
            return Err(SemanticsError::Dimension(format!(
                "cannot contract axes of sizes {n} and {}",
                other.shape[b]
            )));
        }
        let left = self.move_axis_last(a)?;
        let mut perm = vec![b];
        perm.extend((0..other.rank()).filter(|&x| x != b));
        let right = other.permute(&perm)?;
        let rows = left.data.len() / n.max(1);
        let cols = right.data.len() / n.max(1);
        let mut data = vec![0.0; rows * cols];
        for r in 0..rows {
            for k in 0..n {
                let x = left.data[r * n + k];
                if x == 0.0 {
                    continue;
                }
                let row = &right.data[k * cols..(k + 1) * cols];
                for (out, y) in data[r * cols..(r + 1) * cols].iter_mut().zip(row) {
                    *out += x * y;
                }
            }
        }
        let mut shape = left.shape[..left.rank() - 1].to_vec();
        shape.extend_from_slice(&right.shape[1..]);
        Tensor::new(shape, data)
    }

    /// Contracts two axes of the same tensor.
    pub fn trace(&self, a: usize, b: usize) -> Result<Tensor> {
        self.check_axis(a)?;
        self.check_axis(b)?;
        if a == b {
            return Err(SemanticsError::Shape("trace needs two distinct axes".into()));
        }
        let n = self.shape[a];
        if self.shape[b] != n {
            return Err(SemanticsError::Dimension(format!(
                "cannot trace axes of sizes {n} and {}",
                self.shape[b]
            )));
        }
        let mut perm: Vec<usize> = (0..self.rank()).filter(|&x| x != a && x != b).collect();
        perm.push(a);
        perm.push(b);
        let moved = self.permute(&perm)?;
        let block = n * n;
        let rest = moved.data.len() / block.max(1);
        let data = (0..rest)
            .map(|r| (0..n).map(|k| moved.data[r * block + k * n + k]).sum())
            .collect();
        Tensor::new(moved.shape[..moved.rank() - 2].to_vec(), data)
    }

    /// Applies `m` along `axis`: `out[.., i, ..] = sum_j m[i, j] in[.., j, ..]`.
    pub fn transform_axis(&self, axis: usize, m: &DMatrix<f64>) -> Result<Tensor> {
        self.check_axis(axis)?;
        let n = self.shape[axis];
        if m.ncols() != n {
            return Err(SemanticsError::Dimension(format!(
                "matrix with {} columns applied to an axis of size {n}",
                m.ncols()
            )));
        }
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let rows = m.nrows();
        let mut data = vec![0.0; outer * rows * inner];
        for o in 0..outer {
            for i in 0..rows {
                for j in 0..n {
                    let c = m[(i, j)];
                    if c == 0.0 {
                        continue;
                    }
                    let src = &self.data[(o * n + j) * inner..(o * n + j + 1) * inner];
                    let dst = &mut data[(o * rows + i) * inner..(o * rows + i + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += c * s;
                    }
                }
            }
        }
        let mut shape = self.shape.clone();
        shape[axis] = rows;
        Tensor::new(shape, data)
    }

    /// Largest absolute entry-wise difference; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The ε pairing on a space of dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Epsilon {
    pub dim: usize,
}

pub fn epsilon(dim: usize) -> Epsilon {
    assert!(dim >= 1, "epsilon needs a positive dimension");
    Epsilon { dim }
}

impl Epsilon {
    pub fn pair(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != self.dim || v.len() != self.dim {
            return Err(SemanticsError::Dimension(format!(
                "pairing on dimension {} given vectors of length {} and {}",
                self.dim,
                u.len(),
                v.len()
            )));
        }
        Ok(u.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    /// The pairing as a two-axis tensor (the identity matrix).
    pub fn as_tensor(&self) -> Tensor {
        eta(self.dim)
    }
}

/// The η tensor `sum_i e_i (x) e_i`.
pub fn eta(dim: usize) -> Tensor {
    assert!(dim >= 1, "eta needs a positive dimension");
    let mut t = Tensor::zeros(vec![dim, dim]);
    for i in 0..dim {
        t.data[i * dim + i] = 1.0;
    }
    t
}

/// Dimension of the space attached to each atom; adjoints share it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpaceAssignment {
    dims: BTreeMap<Atom, usize>,
}

impl SpaceAssignment {
    /// Requires a positive dimension for every atom of `table`, equal
    /// along the order.
    pub fn new(dims: BTreeMap<Atom, usize>, table: &AtomTable) -> Result<Self> {
        for atom in table.atoms() {
            match dims.get(atom) {
                None => return Err(SemanticsError::MissingDimension(atom.to_string())),
                Some(0) => return Err(SemanticsError::ZeroDimension(atom.to_string())),
                Some(_) => {}
            }
        }
        for (lesser, greater) in table.order_pairs() {
            let (dl, dg) = (dims[lesser], dims[greater]);
            if dl != dg {
                return Err(SemanticsError::OrderedDimensions {
                    lesser: lesser.to_string(),
                    greater: greater.to_string(),
                    dl,
                    dg,
                });
            }
        }
        Ok(SpaceAssignment { dims })
    }

    /// No validation against a table.
    pub fn from_dims(dims: BTreeMap<Atom, usize>) -> Self {
        SpaceAssignment { dims }
    }

    pub fn dims(&self) -> &BTreeMap<Atom, usize> {
        &self.dims
    }

    pub fn dim(&self, atom: &Atom) -> Result<usize> {
        self.dims
            .get(atom)
            .copied()
            .ok_or_else(|| SemanticsError::MissingDimension(atom.to_string()))
    }

    pub fn shape_of(&self, t: &CompoundType) -> Result<Vec<usize>> {
        t.iter().map(|p| self.dim(&p.atom)).collect()
    }

    /// Target-side spaces: each single-atom image inherits its source
    /// atom's dimension.
    pub fn transport(&self, functor: &FunctorSpec) -> Result<SpaceAssignment> {
        let mut dims = BTreeMap::new();
        for (atom, &d) in &self.dims {
            let Some(image) = functor.image_of(atom) else { continue };
            if let [q] = image.parts() {
                if let Some(prev) = dims.insert(q.atom.clone(), d) {
                    if prev != d {
                        return Err(SemanticsError::Dimension(format!(
                            "atom {} receives dimensions {prev} and {d}",
                            q.atom
                        )));
                    }
                }
            }
        }
        Ok(SpaceAssignment { dims })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordTensor {
    pub word: String,
    pub ty: CompoundType,
    pub data: Tensor,
}

impl WordTensor {
    /// Checks one axis per simple type, sized by `spaces`.
    pub fn new(word: impl Into<String>, ty: CompoundType, data: Tensor, spaces: &SpaceAssignment) -> Result<Self> {
        let word = word.into();
        let expected = spaces.shape_of(&ty)?;
        if data.shape() != expected.as_slice() {
            return Err(SemanticsError::Shape(format!(
                "{word} : {ty} needs shape {expected:?}, data has {:?}",
                data.shape()
            )));
        }
        if data.data().iter().any(|x| !x.is_finite()) {
            return Err(SemanticsError::NonFinite(word));
        }
        Ok(WordTensor { word, ty, data })
    }
}

fn check_inputs(w: &ReductionWitness, tensors: &[WordTensor], spaces: &SpaceAssignment) -> Result<Vec<usize>> {
    let mut dims = Vec::new();
    for t in tensors {
        let shape = spaces.shape_of(&t.ty)?;
        if t.data.shape() != shape.as_slice() {
            return Err(SemanticsError::Shape(format!(
                "{} : {} has shape {:?}, spaces give {shape:?}",
                t.word,
                t.ty,
                t.data.shape()
            )));
        }
        dims.extend(shape);
    }
    if w.len() != dims.len() {
        return Err(SemanticsError::WitnessLength {
            witness: w.len(),
            types: dims.len(),
        });
    }
    w.validate(dims.len())?;
    for link in w.links() {
        if dims[link.left] != dims[link.right] {
            return Err(SemanticsError::Dimension(format!(
                "link {link} joins axes of sizes {} and {}",
                dims[link.left], dims[link.right]
            )));
        }
    }
    Ok(dims)
}

/// Contracts the word tensors along the witness links; the result has
/// one axis per residue position, in order.
pub fn interpret(w: &ReductionWitness, tensors: &[WordTensor], spaces: &SpaceAssignment) -> Result<Tensor> {
    let order: Vec<usize> = (0..w.links().len()).collect();
    interpret_ordered(w, tensors, spaces, &order)
}

/// As [`interpret`], processing links in the given order.
pub fn interpret_ordered(
    w: &ReductionWitness,
    tensors: &[WordTensor],
    spaces: &SpaceAssignment,
    order: &[usize],
) -> Result<Tensor> {
    check_inputs(w, tensors, spaces)?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..w.links().len()).collect::<Vec<_>>() {
        return Err(SemanticsError::LinkOrder);
    }

    // each node is a partial network result labelled by input positions
    let mut nodes: Vec<Option<(Tensor, Vec<usize>)>> = Vec::new();
    let mut owner = Vec::new();
    let mut pos = 0;
    for (k, t) in tensors.iter().enumerate() {
        let labels: Vec<usize> = (pos..pos + t.ty.len()).collect();
        owner.extend(std::iter::repeat_n(k, labels.len()));
        pos += labels.len();
        nodes.push(Some((t.data.clone(), labels)));
    }
    let axis = |labels: &[usize], p: usize| labels.iter().position(|&l| l == p).expect("label present");

    for &k in order {
        let link = w.links()[k];
        let (a, b) = (owner[link.left], owner[link.right]);
        if a == b {
            let (t, labels) = nodes[a].take().expect("live node");
            let (x, y) = (axis(&labels, link.left), axis(&labels, link.right));
            let rest = labels.into_iter().filter(|&l| l != link.left && l != link.right).collect();
            nodes[a] = Some((t.trace(x, y)?, rest));
        } else {
            let (ta, la) = nodes[a].take().expect("live node");
            let (tb, lb) = nodes[b].take().expect("live node");
            let merged = ta.tensordot(axis(&la, link.left), &tb, axis(&lb, link.right))?;
            let mut labels: Vec<usize> = la.into_iter().filter(|&l| l != link.left).collect();
            labels.extend(lb.into_iter().filter(|&l| l != link.right));
            for &l in &labels {
                owner[l] = a;
            }
            nodes[a] = Some((merged, labels));
        }
    }

    let mut result = Tensor::scalar(1.0);
    let mut labels = Vec::new();
    for (t, l) in nodes.into_iter().flatten() {
        result = result.outer(&t);
        labels.extend(l);
    }
    let mut perm: Vec<usize> = (0..labels.len()).collect();
    perm.sort_by_key(|&i| labels[i]);
    result.permute(&perm)
}

/// Reference evaluation by summing over every index assignment.
pub fn interpret_brute_force(
    w: &ReductionWitness,
    tensors: &[WordTensor],
    spaces: &SpaceAssignment,
) -> Result<Tensor> {
    let dims = check_inputs(w, tensors, spaces)?;
    // free variables: one per link, then one per residue position
    let mut var_of = vec![0; dims.len()];
    let mut var_dims = Vec::new();
    for link in w.links() {
        var_of[link.left] = var_dims.len();
        var_of[link.right] = var_dims.len();
        var_dims.push(dims[link.left]);
    }
    let links = var_dims.len();
    for &r in w.residue() {
        var_of[r] = var_dims.len();
        var_dims.push(dims[r]);
    }
    let out_shape: Vec<usize> = w.residue().iter().map(|&r| dims[r]).collect();
    let mut out = Tensor::zeros(out_shape.clone());
    let word_strides: Vec<Vec<usize>> = tensors.iter().map(|t| strides(t.data.shape())).collect();
    let out_strides = strides(&out_shape);

    let mut vars = vec![0; var_dims.len()];
    loop {
        let mut product = 1.0;
        let mut p = 0;
        for (t, st) in tensors.iter().zip(&word_strides) {
            let offset: usize = st.iter().enumerate().map(|(i, s)| vars[var_of[p + i]] * s).sum();
            product *= t.data.data()[offset];
            p += st.len();
        }
        let offset: usize = out_strides.iter().enumerate().map(|(i, s)| vars[links + i] * s).sum();
        out.data[offset] += product;
        if !step(&mut vars, &var_dims) {
            break;
        }
    }
    Ok(out)
}

/// Per-atom translation components, with optional per-word replacements.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlphaSpec {
    pub components: BTreeMap<Atom, DMatrix<f64>>,
    pub word_overrides: BTreeMap<String, WordTensor>,
}

impl AlphaSpec {
    pub fn identity(spaces: &SpaceAssignment) -> Self {
        AlphaSpec {
            components: spaces
                .dims()
                .iter()
                .map(|(a, &d)| (a.clone(), DMatrix::identity(d, d)))
                .collect(),
            word_overrides: BTreeMap::new(),
        }
    }

    /// Seeded invertible components. Atoms linked by the order share one
    /// matrix, so contractions between them keep their value.
    pub fn random(spaces: &SpaceAssignment, table: &AtomTable, seed: u64) -> Self {
        let mut rng = Lcg64::new(seed);
        let mut group: BTreeMap<Atom, Atom> = BTreeMap::new();
        let root = |group: &BTreeMap<Atom, Atom>, a: &Atom| {
            let mut a = a.clone();
            while let Some(p) = group.get(&a) {
                a = p.clone();
            }
            a
        };
        for (lesser, greater) in table.order_pairs() {
            let (x, y) = (root(&group, lesser), root(&group, greater));
            if x != y {
                group.insert(x, y);
            }
        }
        let mut by_root: HashMap<Atom, DMatrix<f64>> = HashMap::new();
        let mut components = BTreeMap::new();
        for (atom, &d) in spaces.dims() {
            let r = root(&group, atom);
            let m = by_root
                .entry(r)
                .or_insert_with(|| {
                    // diagonally dominant, hence invertible
                    DMatrix::from_fn(d, d, |_, _| rng.next_signed()) + DMatrix::identity(d, d) * d as f64
                })
                .clone();
            components.insert(atom.clone(), m);
        }
        AlphaSpec {
            components,
            word_overrides: BTreeMap::new(),
        }
    }

    fn axis_map(&self, p: &SimpleType) -> Result<DMatrix<f64>> {
        let m = self
            .components
            .get(&p.atom)
            .ok_or_else(|| SemanticsError::MissingComponent(p.atom.to_string()))?;
        if p.exponent.rem_euclid(2) == 0 {
            Ok(m.clone())
        } else {
            m.clone()
                .try_inverse()
                .map(|inv| inv.transpose())
                .ok_or_else(|| SemanticsError::NotInvertible(p.atom.to_string()))
        }
    }

    /// Transforms each axis by the component of its atom (inverse
    /// transpose on odd exponents), then reverses axis order if asked.
    pub fn transform(&self, t: &Tensor, ty: &CompoundType, reversed: bool) -> Result<Tensor> {
        if t.rank() != ty.len() {
            return Err(SemanticsError::Shape(format!(
                "tensor of rank {} for type {ty} of length {}",
                t.rank(),
                ty.len()
            )));
        }
        let mut out = t.clone();
        for (i, p) in ty.iter().enumerate() {
            out = out.transform_axis(i, &self.axis_map(p)?)?;
        }
        if reversed {
            let perm: Vec<usize> = (0..out.rank()).rev().collect();
            out = out.permute(&perm)?;
        }
        Ok(out)
    }
}

/// Carries a source word tensor to the target model at `image_type`.
pub fn apply_alpha(alpha: &AlphaSpec, t: &WordTensor, image_type: &CompoundType, reversed: bool) -> Result<WordTensor> {
    if let Some(over) = alpha.word_overrides.get(&t.word) {
        if &over.ty != image_type {
            return Err(SemanticsError::Shape(format!(
                "override for {} has type {}, expected {image_type}",
                t.word, over.ty
            )));
        }
        return Ok(over.clone());
    }
    if image_type.len() != t.ty.len() {
        return Err(SemanticsError::Shape(format!(
            "image {image_type} of {} changes the number of axes",
            t.ty
        )));
    }
    Ok(WordTensor {
        word: t.word.clone(),
        ty: image_type.clone(),
        data: alpha.transform(&t.data, &t.ty, reversed)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NaturalityReport {
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares "interpret, then α on the result" with "α on each word, then
/// interpret in the target".
#[allow(clippy::too_many_arguments)]
pub fn check_naturality(
    alpha: &AlphaSpec,
    src_spaces: &SpaceAssignment,
    src_witness: &ReductionWitness,
    src_tensors: &[WordTensor],
    functor: &FunctorSpec,
    tgt_witness: &ReductionWitness,
    tolerance: f64,
) -> Result<NaturalityReport> {
    let reversed = match functor.mode() {
        FunctorMode::Homomorphism => false,
        FunctorMode::Antihomomorphism => true,
        FunctorMode::Bracewise { .. } => return Err(SemanticsError::Unsupported("bracewise")),
    };
    let n = src_witness.len();
    let mapped = |p: usize| if reversed { n - 1 - p } else { p };
    let expected_links: std::collections::BTreeSet<(usize, usize)> = src_witness
        .links()
        .iter()
        .map(|l| {
            let (a, b) = (mapped(l.left), mapped(l.right));
            (a.min(b), a.max(b))
        })
        .collect();
    let mut expected_residue: Vec<usize> = src_witness.residue().iter().map(|&p| mapped(p)).collect();
    expected_residue.sort_unstable();
    if tgt_witness.len() != n || tgt_witness.link_set() != expected_links || tgt_witness.residue() != expected_residue {
        return Err(SemanticsError::Structure(format!(
            "expected links {expected_links:?} and residue {expected_residue:?}"
        )));
    }

    let source_meaning = interpret(src_witness, src_tensors, src_spaces)?;
    let flat: CompoundType = src_tensors.iter().flat_map(|t| t.ty.iter().cloned()).collect();
    let residue_type = src_witness.residue_type(&flat);
    let lhs = alpha.transform(&source_meaning, &residue_type, reversed)?;

    let mut tgt_tensors = src_tensors
        .iter()
        .map(|t| {
            let image = functor.map_type(&t.ty).map_err(|e| SemanticsError::Translate(e.to_string()))?;
            apply_alpha(alpha, t, &image, reversed)
        })
        .collect::<Result<Vec<_>>>()?;
    if reversed {
        tgt_tensors.reverse();
    }
    let tgt_spaces = src_spaces.transport(functor)?;
    // same contraction sequence on both sides keeps rounding identical
    let order: Vec<usize> = src_witness
        .links()
        .iter()
        .map(|l| {
            let (a, b) = (mapped(l.left), mapped(l.right));
            let (a, b) = (a.min(b), a.max(b));
            tgt_witness
                .links()
                .iter()
                .position(|t| t.left == a && t.right == b)
                .expect("links correspond")
        })
        .collect();
    let rhs = interpret_ordered(tgt_witness, &tgt_tensors, &tgt_spaces, &order)?;

    let residual = lhs.max_abs_diff(&rhs);
    Ok(NaturalityReport {
        residual,
        tolerance,
        passed: residual <= tolerance,
    })
}

/// 64-bit linear congruential generator used for seeded fixture data.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Row-major fill of a tensor of the given shape.
    pub fn tensor(&mut self, shape: Vec<usize>) -> Tensor {
        let n = shape.iter().product();
        let data = (0..n).map(|_| self.next_signed()).collect();
        Tensor { shape, data }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum FixtureData {
    Seed { seed: u64 },
    Nested(serde_json::Value),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureWord {
    word: String,
    #[serde(rename = "type")]
    ty: String,
    data: FixtureData,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureFile {
    #[serde(rename = "_comment", default)]
    _comment: Option<serde_json::Value>,
    spaces: BTreeMap<String, usize>,
    words: Vec<FixtureWord>,
}

/// Word tensors and spaces read from a fixture file.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFixture {
    pub spaces: SpaceAssignment,
    pub words: Vec<WordTensor>,
}

impl TensorFixture {
    pub fn from_json(text: &str, origin: &str, table: &AtomTable) -> Result<Self> {
        let fail = |message: String| SemanticsError::Fixture {
            origin: origin.to_string(),
            message,
        };
        let file: FixtureFile = serde_json::from_str(text).map_err(|e| fail(e.to_string()))?;
        let mut dims = BTreeMap::new();
        for (name, d) in file.spaces {
            let atom = table.get(&name).cloned().ok_or_else(|| fail(format!("unknown atom {name}")))?;
            dims.insert(atom, d);
        }
        let spaces = SpaceAssignment::new(dims, table)?;
        let mut words = Vec::new();
        for w in file.words {
            let ty = parse_compound(&w.ty, table).map_err(|e| fail(format!("{}: {e}", w.word)))?;
            let data = match &w.data {
                FixtureData::Seed { seed } => Lcg64::new(*seed).tensor(spaces.shape_of(&ty)?),
                FixtureData::Nested(v) => Tensor::from_nested(v).map_err(|e| fail(format!("{}: {e}", w.word)))?,
            };
            words.push(WordTensor::new(w.word, ty, data, &spaces)?);
        }
        Ok(TensorFixture { spaces, words })
    }

    pub fn load(path: impl AsRef<Path>, table: &AtomTable) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SemanticsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string(), table)
    }

    pub fn tensor_for(&self, word: &str, ty: &CompoundType) -> Option<&WordTensor> {
        self.words.iter().find(|w| w.word == word && &w.ty == ty)
    }

    /// Tensors for a typed sentence, in order.
    pub fn sentence_tensors(&self, words: &[(String, CompoundType)]) -> Result<Vec<WordTensor>> {
        words
            .iter()
            .map(|(w, ty)| {
                self.tensor_for(w, ty).cloned().ok_or_else(|| SemanticsError::MissingWord {
                    word: w.clone(),
                    ty: ty.to_string(),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::Link;

    fn table() -> AtomTable {
        AtomTable::new(["n", "s"], Vec::<(&str, &str)>::new()).unwrap()
    }

    fn spaces(n: usize, s: usize) -> SpaceAssignment {
        let t = table();
        let dims = [("n", n), ("s", s)]
            .iter()
            .map(|(a, d)| (t.get(a).unwrap().clone(), *d))
            .collect();
        SpaceAssignment::new(dims, &t).unwrap()
    }

    fn word(name: &str, ty: &str, data: Tensor, sp: &SpaceAssignment) -> WordTensor {
        WordTensor::new(name, parse_compound(ty, &table()).unwrap(), data, sp).unwrap()
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(1).pair(&[2.0], &[3.0]).unwrap(), 6.0);
        assert_eq!(epsilon(2).pair(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(epsilon(2).pair(&[0.0, 1.0], &[0.0, 1.0]).unwrap(), 1.0);
        let mut rng = Lcg64::new(7);
        let (u, v): (Vec<f64>, Vec<f64>) = (0..3).map(|_| (rng.next_signed(), rng.next_signed())).unzip();
        let mut sum = 0.0;
        for i in 0..3 {
            sum += u[i] * v[i];
        }
        assert!((epsilon(3).pair(&u, &v).unwrap() - sum).abs() < 1e-15);
        assert!(epsilon(2).pair(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn eta_is_identity() {
        assert_eq!(eta(1).data(), &[1.0]);
        assert_eq!(eta(3).data(), &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn snake_identity() {
        for dim in 1..=5 {
            let v = Lcg64::new(dim as u64).tensor(vec![dim]);
            // (eps (x) 1)(v (x) eta) = v
            let yanked = v.tensordot(0, &eta(dim), 0).unwrap();
            assert!(yanked.max_abs_diff(&v) <= 1e-12);
            // (1 (x) eps)(eta (x) v) = v
            let yanked = eta(dim).tensordot(1, &v, 0).unwrap();
            assert!(yanked.max_abs_diff(&v) <= 1e-12);
        }
    }

    #[test]
    fn tensor_ops() {
        let t = Tensor::new(vec![2, 3], (0..6).map(f64::from).collect()).unwrap();
        let p = t.permute(&[1, 0]).unwrap();
        assert_eq!(p.shape(), &[3, 2]);
        assert_eq!(p.get(&[2, 1]), t.get(&[1, 2]));
        assert!(t.permute(&[0, 0]).is_err());
        let sq = Tensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(sq.trace(0, 1).unwrap().as_scalar(), Some(5.0));
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(sq.transform_axis(0, &m).unwrap().data(), &[3.0, 4.0, 1.0, 2.0]);
        assert!(Tensor::new(vec![2, 2], vec![1.0]).is_err());
        let nested = Tensor::from_nested(&serde_json::json!([[1, 2], [3, 4]])).unwrap();
        assert_eq!(nested, sq);
        assert!(Tensor::from_nested(&serde_json::json!([[1, 2], [3]])).is_err());
    }

    #[test]
    fn single_pairing() {
        let sp = spaces(3, 1);
        let u = Tensor::vector(vec![1.0, 2.0, 3.0]);
        let v = Tensor::vector(vec![4.0, -1.0, 0.5]);
        let words = [word("u", "n", u, &sp), word("v", "n^r", v, &sp)];
        let w = ReductionWitness::from_links(vec![Link::new(0, 1)], 2);
        let out = interpret(&w, &words, &sp).unwrap();
        assert_eq!(out.as_scalar(), Some(1.0 * 4.0 - 2.0 + 1.5));
    }

    #[test]
    fn pigeons_eat_bread_matches_index_sum() {
        let sp = spaces(2, 2);
        let pigeons = Tensor::vector(vec![1.0, 2.0]);
        let bread = Tensor::vector(vec![-1.0, 3.0]);
        let eat = Tensor::new(vec![2, 2, 2], (1..=8).map(f64::from).collect()).unwrap();
        let words = [
            word("pigeons", "n", pigeons.clone(), &sp),
            word("eat", "n^r s n^l", eat.clone(), &sp),
            word("bread", "n", bread.clone(), &sp),
        ];
        let w = ReductionWitness::from_links(vec![Link::new(0, 1), Link::new(3, 4)], 5);
        let out = interpret(&w, &words, &sp).unwrap();
        let mut expected = [0.0; 2];
        for (s, e) in expected.iter_mut().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    *e += pigeons.get(&[i]) * eat.get(&[i, s, j]) * bread.get(&[j]);
                }
            }
        }
        assert_eq!(out.shape(), &[2]);
        assert!(out.max_abs_diff(&Tensor::vector(expected.to_vec())) <= 1e-12);
        let brute = interpret_brute_force(&w, &words, &sp).unwrap();
        assert!(out.max_abs_diff(&brute) <= 1e-12);
        let reordered = interpret_ordered(&w, &words, &sp, &[1, 0]).unwrap();
        assert!(out.max_abs_diff(&reordered) <= 1e-12);
        assert!(matches!(
            interpret_ordered(&w, &words, &sp, &[0, 0]),
            Err(SemanticsError::LinkOrder)
        ));
    }

    #[test]
    fn copier_selects_slice() {
        let sp = spaces(2, 2);
        // verb[i, s, j] = 1 when i == s == j
        let mut verb = Tensor::zeros(vec![2, 2, 2]);
        verb.data[0] = 1.0;
        verb.data[7] = 1.0;
        let e1 = Tensor::vector(vec![0.0, 1.0]);
        let words = [
            word("a", "n", e1.clone(), &sp),
            word("v", "n^r s n^l", verb, &sp),
            word("b", "n", e1, &sp),
        ];
        let w = ReductionWitness::from_links(vec![Link::new(0, 1), Link::new(3, 4)], 5);
        assert_eq!(interpret(&w, &words, &sp).unwrap().data(), &[0.0, 1.0]);
    }

    #[test]
    fn mismatched_inputs_are_errors() {
        let sp = spaces(2, 3);
        let words = [
            word("a", "n", Tensor::vector(vec![1.0, 0.0]), &sp),
            word("b", "s^r", Tensor::vector(vec![1.0, 0.0, 0.0]), &sp),
        ];
        let w = ReductionWitness::from_links(vec![Link::new(0, 1)], 2);
        assert!(matches!(interpret(&w, &words, &sp), Err(SemanticsError::Dimension(_))));
        let w3 = ReductionWitness::from_links(vec![Link::new(0, 1)], 3);
        assert!(matches!(
            interpret(&w3, &words, &sp),
            Err(SemanticsError::WitnessLength { .. })
        ));
    }

    #[test]
    fn ordered_atoms_share_dimension() {
        let t = AtomTable::new(["n", "pi"], [("n", "pi")]).unwrap();
        let dims = |a: usize, b: usize| {
            [("n", a), ("pi", b)]
                .iter()
                .map(|(x, d)| (t.get(x).unwrap().clone(), *d))
                .collect::<BTreeMap<_, _>>()
        };
        assert!(SpaceAssignment::new(dims(2, 2), &t).is_ok());
        assert!(matches!(
            SpaceAssignment::new(dims(2, 3), &t),
            Err(SemanticsError::OrderedDimensions { .. })
        ));
        let mut partial = dims(2, 2);
        partial.remove(t.get("pi").unwrap());
        assert!(matches!(
            SpaceAssignment::new(partial, &t),
            Err(SemanticsError::MissingDimension(_))
        ));
    }

    #[test]
    fn alpha_preserves_pairings() {
        let sp = spaces(3, 1);
        let alpha = AlphaSpec::random(&sp, &table(), 11);
        let mut rng = Lcg64::new(5);
        let u = rng.tensor(vec![3]);
        let v = rng.tensor(vec![3]);
        let n = parse_compound("n", &table()).unwrap();
        let nr = parse_compound("n^r", &table()).unwrap();
        let u2 = alpha.transform(&u, &n, false).unwrap();
        let v2 = alpha.transform(&v, &nr, false).unwrap();
        let before = epsilon(3).pair(u.data(), v.data()).unwrap();
        let after = epsilon(3).pair(u2.data(), v2.data()).unwrap();
        assert!((before - after).abs() <= 1e-9);

        let id = AlphaSpec::identity(&sp);
        let t = rng.tensor(vec![3, 1]);
        let ty = parse_compound("n s", &table()).unwrap();
        assert_eq!(id.transform(&t, &ty, false).unwrap(), t);
        assert_eq!(id.transform(&t, &ty, true).unwrap(), t.permute(&[1, 0]).unwrap());
    }

    #[test]
    fn singular_component_is_reported() {
        let sp = spaces(2, 1);
        let mut alpha = AlphaSpec::identity(&sp);
        alpha.components.insert(table().get("n").unwrap().clone(), DMatrix::zeros(2, 2));
        let nr = parse_compound("n^r", &table()).unwrap();
        assert!(matches!(
            alpha.transform(&Tensor::vector(vec![1.0, 1.0]), &nr, false),
            Err(SemanticsError::NotInvertible(_))
        ));
    }

    #[test]
    fn lcg_sequence_is_fixed() {
        let mut rng = Lcg64::new(0);
        assert_eq!(rng.next_u64(), 1442695040888963407);
        assert_eq!(rng.next_u64(), 1442695040888963407u64.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407));
        let x = Lcg64::new(42).next_signed();
        assert!((-1.0..1.0).contains(&x));
    }

    #[test]
    fn fixture_parsing() {
        let text = r#"{
            "_comment": "test",
            "spaces": {"n": 2, "s": 1},
            "words": [
                {"word": "a", "type": "n", "data": [1, 2]},
                {"word": "b", "type": "n^r s", "data": {"seed": 3}}
            ]
        }"#;
        let fx = TensorFixture::from_json(text, "inline", &table()).unwrap();
        assert_eq!(fx.words[1].data.shape(), &[2, 1]);
        assert_eq!(fx.words[1].data, Lcg64::new(3).tensor(vec![2, 1]));
        let bad = text.replace("[1, 2]", "[1, 2, 3]");
        assert!(TensorFixture::from_json(&bad, "inline", &table()).is_err());
    }
}
