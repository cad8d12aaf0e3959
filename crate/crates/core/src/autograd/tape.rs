//! Reverse-mode tape with second-order support.
//!
//! Every backward rule is expressed through the same tape primitives, so
//! the gradients returned by [`grad`] are themselves recorded and can be
//! differentiated again (needed for the gradient-penalty term, which
//! differentiates a gradient norm with respect to network parameters).

use std::cell::RefCell;
use std::rc::Rc;

use super::tensor::Tensor;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
#[allow(dead_code)]
enum Op {
    Leaf,
    Constant,
    MatMul,
    Add,
    BiasAdd,
    Sub,
    ScalarMul(f64),
    AddScalar(f64),
    Mul,
    LeakyRelu(f64),
    Tanh,
    Square,
    Sqrt,
    Recip,
    SumAll,
    SumAxis0,
    SumAxis1,
    BroadcastScalar,
    BroadcastRows,
    BroadcastCols,
    Transpose,
    ConcatRows,
    SliceRows { start: usize, len: usize },
    PadRows { start: usize, total: usize },
}

#[derive(Debug)]
struct Node {
    op: Op,
    parents: Vec<usize>,
    value: Tensor,
}

#[derive(Debug, Default)]
struct TapeInner {
    nodes: Vec<Node>,
}

/// Recording tape. Cloning is cheap and shares the underlying graph.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    inner: Rc<RefCell<TapeInner>>,
}

/// Handle to one node on a tape.
#[derive(Debug, Clone)]
pub struct Value {
    tape: Tape,
    id: usize,
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.inner.borrow().nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, op: Op, parents: Vec<usize>, value: Tensor) -> Value {
        let mut inner = self.inner.borrow_mut();
        let id = inner.nodes.len();
        inner.nodes.push(Node { op, parents, value });
        Value {
            tape: self.clone(),
            id,
        }
    }

    /// Differentiable input (network parameter or data requiring grad).
    pub fn leaf(&self, value: Tensor) -> Value {
        self.push(Op::Leaf, vec![], value)
    }

    /// Non-differentiable input.
    pub fn constant(&self, value: Tensor) -> Value {
        self.push(Op::Constant, vec![], value)
    }

    fn same_tape(&self, other: &Tape) -> bool {
        Rc::ptr_eq(&self.inner, &other.inner)
    }
}

fn shape_err(op: &str, left: &Tensor, right: &Tensor) -> Error {
    Error::ShapeMismatch {
        op: op.into(),
        left: left.shape.clone(),
        right: right.shape.clone(),
    }
}

impl Value {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn tape(&self) -> &Tape {
        &self.tape
    }

    pub fn value(&self) -> Tensor {
        self.tape.inner.borrow().nodes[self.id].value.clone()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.tape.inner.borrow().nodes[self.id].value.shape.clone()
    }

    pub fn scalar_value(&self) -> f64 {
        self.tape.inner.borrow().nodes[self.id].value.data[0]
    }

    fn with<T>(&self, f: impl FnOnce(&Tensor) -> T) -> T {
        f(&self.tape.inner.borrow().nodes[self.id].value)
    }

    fn binary(&self, other: &Value, op: Op, out: Tensor) -> Value {
        debug_assert!(self.tape.same_tape(&other.tape));
        self.tape.push(op, vec![self.id, other.id], out)
    }

    fn unary(&self, op: Op, out: Tensor) -> Value {
        self.tape.push(op, vec![self.id], out)
    }

    pub fn matmul(&self, other: &Value) -> Result<Value> {
        let (a, b) = (self.value(), other.value());
        if a.shape.len() != 2 || b.shape.len() != 2 || a.shape[1] != b.shape[0] {
            return Err(shape_err("matmul", &a, &b));
        }
        let (n, k, m) = (a.shape[0], a.shape[1], b.shape[1]);
        let mut out = vec![0.0; n * m];
        for i in 0..n {
            for p in 0..k {
                let aip = a.data[i * k + p];
                if aip == 0.0 {
                    continue;
                }
                let row = &b.data[p * m..(p + 1) * m];
                let acc = &mut out[i * m..(i + 1) * m];
                for j in 0..m {
                    acc[j] += aip * row[j];
                }
            }
        }
        Ok(self.binary(other, Op::MatMul, Tensor::new(vec![n, m], out)?))
    }

    pub fn add(&self, other: &Value) -> Result<Value> {
        let (a, b) = (self.value(), other.value());
        if a.shape != b.shape {
            return Err(shape_err("add", &a, &b));
        }
        let data = a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect();
        Ok(self.binary(other, Op::Add, Tensor::new(a.shape, data)?))
    }

    /// [rows, cols] + [cols], broadcast over rows.
    pub fn bias_add(&self, bias: &Value) -> Result<Value> {
        let (a, b) = (self.value(), bias.value());
        if a.shape.len() != 2 || b.shape.len() != 1 || a.shape[1] != b.shape[0] {
            return Err(shape_err("bias_add", &a, &b));
        }
        let (r, c) = (a.shape[0], a.shape[1]);
        let mut data = a.data.clone();
        for i in 0..r {
            for j in 0..c {
                data[i * c + j] += b.data[j];
            }
        }
        Ok(self.binary(bias, Op::BiasAdd, Tensor::new(vec![r, c], data)?))
    }

    pub fn sub(&self, other: &Value) -> Result<Value> {
        let (a, b) = (self.value(), other.value());
        if a.shape != b.shape {
            return Err(shape_err("sub", &a, &b));
        }
        let data = a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect();
        Ok(self.binary(other, Op::Sub, Tensor::new(a.shape, data)?))
    }

    pub fn mul(&self, other: &Value) -> Result<Value> {
        let (a, b) = (self.value(), other.value());
        if a.shape != b.shape {
            return Err(shape_err("mul", &a, &b));
        }
        let data = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
        Ok(self.binary(other, Op::Mul, Tensor::new(a.shape, data)?))
    }

    pub fn scalar_mul(&self, k: f64) -> Value {
        let a = self.value();
        let data = a.data.iter().map(|x| x * k).collect::<Vec<_>>();
        self.unary(Op::ScalarMul(k), Tensor { shape: a.shape, data })
    }

    pub fn add_scalar(&self, k: f64) -> Value {
        let a = self.value();
        let data = a.data.iter().map(|x| x + k).collect::<Vec<_>>();
        self.unary(Op::AddScalar(k), Tensor { shape: a.shape, data })
    }

    pub fn neg(&self) -> Value {
        self.scalar_mul(-1.0)
    }

    pub fn leaky_relu(&self, slope: f64) -> Value {
        let a = self.value();
        let data = a
            .data
            .iter()
            .map(|&x| if x > 0.0 { x } else { slope * x })
            .collect::<Vec<_>>();
        self.unary(Op::LeakyRelu(slope), Tensor { shape: a.shape, data })
    }

    pub fn tanh(&self) -> Value {
        let a = self.value();
        let data = a.data.iter().map(|x| x.tanh()).collect::<Vec<_>>();
        self.unary(Op::Tanh, Tensor { shape: a.shape, data })
    }

    pub fn square(&self) -> Value {
        let a = self.value();
        let data = a.data.iter().map(|x| x * x).collect::<Vec<_>>();
        self.unary(Op::Square, Tensor { shape: a.shape, data })
    }

    pub fn sqrt(&self) -> Value {
        let a = self.value();
        let data = a.data.iter().map(|x| x.sqrt()).collect::<Vec<_>>();
        self.unary(Op::Sqrt, Tensor { shape: a.shape, data })
    }

    pub fn recip(&self) -> Value {
        let a = self.value();
        let data = a.data.iter().map(|x| 1.0 / x).collect::<Vec<_>>();
        self.unary(Op::Recip, Tensor { shape: a.shape, data })
    }

    pub fn sum_all(&self) -> Value {
        let a = self.value();
        self.unary(Op::SumAll, Tensor::scalar(a.data.iter().sum()))
    }

    pub fn mean_all(&self) -> Value {
        let n = self.with(|t| t.len());
        self.sum_all().scalar_mul(1.0 / n as f64)
    }

    pub fn sum_axis0(&self) -> Result<Value> {
        let a = self.value();
        if a.shape.len() != 2 {
            return Err(shape_err("sum_axis0", &a, &a));
        }
        let (r, c) = (a.shape[0], a.shape[1]);
        let mut out = vec![0.0; c];
        for i in 0..r {
            for j in 0..c {
                out[j] += a.data[i * c + j];
            }
        }
        Ok(self.unary(Op::SumAxis0, Tensor::vector(out)))
    }

    pub fn sum_axis1(&self) -> Result<Value> {
        let a = self.value();
        if a.shape.len() != 2 {
            return Err(shape_err("sum_axis1", &a, &a));
        }
        let (r, c) = (a.shape[0], a.shape[1]);
        let out = (0..r)
            .map(|i| a.data[i * c..(i + 1) * c].iter().sum())
            .collect();
        Ok(self.unary(Op::SumAxis1, Tensor::vector(out)))
    }

    pub fn broadcast_scalar(&self, shape: Vec<usize>) -> Result<Value> {
        let a = self.value();
        if !a.is_scalar() {
            return Err(shape_err("broadcast_scalar", &a, &a));
        }
        let out = Tensor {
            data: vec![a.data[0]; shape.iter().product()],
            shape,
        };
        Ok(self.unary(Op::BroadcastScalar, out))
    }

    /// [c] -> [rows, c]
    pub fn broadcast_rows(&self, rows: usize) -> Result<Value> {
        let a = self.value();
        if a.shape.len() != 1 {
            return Err(shape_err("broadcast_rows", &a, &a));
        }
        let c = a.shape[0];
        let mut data = Vec::with_capacity(rows * c);
        for _ in 0..rows {
            data.extend_from_slice(&a.data);
        }
        Ok(self.unary(Op::BroadcastRows, Tensor::new(vec![rows, c], data)?))
    }

    /// [r] -> [r, cols]
    pub fn broadcast_cols(&self, cols: usize) -> Result<Value> {
        let a = self.value();
        if a.shape.len() != 1 {
            return Err(shape_err("broadcast_cols", &a, &a));
        }
        let r = a.shape[0];
        let mut data = Vec::with_capacity(r * cols);
        for i in 0..r {
            data.extend(std::iter::repeat(a.data[i]).take(cols));
        }
        Ok(self.unary(Op::BroadcastCols, Tensor::new(vec![r, cols], data)?))
    }

    pub fn transpose(&self) -> Result<Value> {
        let a = self.value();
        if a.shape.len() != 2 {
            return Err(shape_err("transpose", &a, &a));
        }
        let (r, c) = (a.shape[0], a.shape[1]);
        let mut out = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..c {
                out[j * r + i] = a.data[i * c + j];
            }
        }
        Ok(self.unary(Op::Transpose, Tensor::new(vec![c, r], out)?))
    }

    pub fn concat_rows(&self, other: &Value) -> Result<Value> {
        let (a, b) = (self.value(), other.value());
        if a.shape.len() != 2 || b.shape.len() != 2 || a.shape[1] != b.shape[1] {
            return Err(shape_err("concat_rows", &a, &b));
        }
        let mut data = a.data.clone();
        data.extend_from_slice(&b.data);
        Ok(self.binary(
            other,
            Op::ConcatRows,
            Tensor::new(vec![a.shape[0] + b.shape[0], a.shape[1]], data)?,
        ))
    }

    pub fn slice_rows(&self, start: usize, len: usize) -> Result<Value> {
        let a = self.value();
        if a.shape.len() != 2 || start + len > a.shape[0] {
            return Err(shape_err("slice_rows", &a, &a));
        }
        let c = a.shape[1];
        let data = a.data[start * c..(start + len) * c].to_vec();
        Ok(self.unary(Op::SliceRows { start, len }, Tensor::new(vec![len, c], data)?))
    }

    pub fn pad_rows(&self, start: usize, total: usize) -> Result<Value> {
        let a = self.value();
        if a.shape.len() != 2 || start + a.shape[0] > total {
            return Err(shape_err("pad_rows", &a, &a));
        }
        let c = a.shape[1];
        let mut data = vec![0.0; total * c];
        data[start * c..(start + a.shape[0]) * c].copy_from_slice(&a.data);
        Ok(self.unary(Op::PadRows { start, total }, Tensor::new(vec![total, c], data)?))
    }

    /// Per-row Euclidean norm of a [rows, cols] tensor, guarded with a
    /// 1e-12 floor inside the square root so the gradient stays finite at 0.
    pub fn l2_norm_rows(&self) -> Result<Value> {
        Ok(self.square().sum_axis1()?.add_scalar(1e-12).sqrt())
    }
}

/// Reverse-mode gradients of a scalar `output` with respect to `inputs`.
///
/// Gradients are recorded on the same tape, so with `create_graph` they can
/// be fed into another `grad` call. (The recording happens either way; the
/// flag documents intent at the call site.) An input unreachable from the
/// output yields a zero gradient.
pub fn grad(output: &Value, inputs: &[Value], _create_graph: bool) -> Result<Vec<Value>> {
    let tape = output.tape().clone();
    if !output.value().is_scalar() {
        return Err(Error::ShapeMismatch {
            op: "grad output must be scalar".into(),
            left: output.shape(),
            right: vec![1],
        });
    }
    for input in inputs {
        if !tape.same_tape(input.tape()) {
            return Err(Error::Config("grad input on a different tape".into()));
        }
    }

    let mut adjoints: Vec<Option<Value>> = vec![None; output.id() + 1];
    adjoints[output.id()] = Some(tape.constant(Tensor::ones(output.shape())));

    for id in (0..=output.id()).rev() {
        let adj = match adjoints[id].take() {
            Some(a) => a,
            None => continue,
        };
        let (op, parents) = {
            let inner = tape.inner.borrow();
            let node = &inner.nodes[id];
            (node.op.clone(), node.parents.clone())
        };
        let contribs = backward(&tape, &op, &parents, id, &adj)?;
        for (pid, contrib) in contribs {
            adjoints[pid] = Some(match adjoints[pid].take() {
                Some(existing) => existing.add(&contrib)?,
                None => contrib,
            });
        }
        adjoints[id] = Some(adj);
    }

    inputs
        .iter()
        .map(|input| {
            Ok(match adjoints.get(input.id()).and_then(|a| a.clone()) {
                Some(a) => a,
                None => tape.constant(Tensor::zeros(input.shape())),
            })
        })
        .collect()
}

fn node_value_handle(tape: &Tape, id: usize) -> Value {
    Value {
        tape: tape.clone(),
        id,
    }
}

fn backward(
    tape: &Tape,
    op: &Op,
    parents: &[usize],
    node_id: usize,
    adj: &Value,
) -> Result<Vec<(usize, Value)>> {
    let parent = |k: usize| node_value_handle(tape, parents[k]);
    let this = || node_value_handle(tape, node_id);
    Ok(match op {
        Op::Leaf | Op::Constant => vec![],
        Op::MatMul => {
            let (a, b) = (parent(0), parent(1));
            vec![
                (parents[0], adj.matmul(&b.transpose()?)?),
                (parents[1], a.transpose()?.matmul(adj)?),
            ]
        }
        Op::Add => vec![(parents[0], adj.clone()), (parents[1], adj.clone())],
        Op::BiasAdd => vec![
            (parents[0], adj.clone()),
            (parents[1], adj.sum_axis0()?),
        ],
        Op::Sub => vec![(parents[0], adj.clone()), (parents[1], adj.neg())],
        Op::ScalarMul(k) => vec![(parents[0], adj.scalar_mul(*k))],
        Op::AddScalar(_) => vec![(parents[0], adj.clone())],
        Op::Mul => {
            let (a, b) = (parent(0), parent(1));
            vec![(parents[0], adj.mul(&b)?), (parents[1], adj.mul(&a)?)]
        }
        Op::LeakyRelu(slope) => {
            // piecewise-constant factor; the subgradient at 0 takes the
            // negative-side slope
            let x = parent(0).value();
            let mask = Tensor {
                shape: x.shape.clone(),
                data: x
                    .data
                    .iter()
                    .map(|&v| if v > 0.0 { 1.0 } else { *slope })
                    .collect(),
            };
            let mask = tape.constant(mask);
            vec![(parents[0], adj.mul(&mask)?)]
        }
        Op::Tanh => {
            let y = this();
            vec![(parents[0], adj.sub(&adj.mul(&y.square())?)?)]
        }
        Op::Square => {
            let x = parent(0);
            vec![(parents[0], adj.mul(&x)?.scalar_mul(2.0))]
        }
        Op::Sqrt => {
            let y = this();
            vec![(parents[0], adj.mul(&y.recip())?.scalar_mul(0.5))]
        }
        Op::Recip => {
            let y = this();
            vec![(parents[0], adj.mul(&y.square())?.neg())]
        }
        Op::SumAll => {
            let shape = parent(0).shape();
            vec![(parents[0], adj.broadcast_scalar(shape)?)]
        }
        Op::SumAxis0 => {
            let rows = parent(0).shape()[0];
            vec![(parents[0], adj.broadcast_rows(rows)?)]
        }
        Op::SumAxis1 => {
            let cols = parent(0).shape()[1];
            vec![(parents[0], adj.broadcast_cols(cols)?)]
        }
        Op::BroadcastScalar => vec![(parents[0], adj.sum_all())],
        Op::BroadcastRows => vec![(parents[0], adj.sum_axis0()?)],
        Op::BroadcastCols => vec![(parents[0], adj.sum_axis1()?)],
        Op::Transpose => vec![(parents[0], adj.transpose()?)],
        Op::ConcatRows => {
            let ra = parent(0).shape()[0];
            let rb = parent(1).shape()[0];
            vec![
                (parents[0], adj.slice_rows(0, ra)?),
                (parents[1], adj.slice_rows(ra, rb)?),
            ]
        }
        Op::SliceRows { start, .. } => {
            let total = parent(0).shape()[0];
            vec![(parents[0], adj.pad_rows(*start, total)?)]
        }
        Op::PadRows { start, .. } => {
            let len = parent(0).shape()[0];
            vec![(parents[0], adj.slice_rows(*start, len)?)]
        }
    })
}
