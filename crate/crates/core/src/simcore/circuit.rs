//! Circuits on a time lattice. Operations sharing a time index form one
//! parallel layer and must act on disjoint qubits.

use std::fmt;
use std::sync::Arc;

use super::gate::Gate;
use crate::error::{Error, Result};

type BitMap = dyn Fn(u64) -> u64 + Send + Sync;

/// A reversible classical function on `width` bits, applied as a basis
/// permutation. Sub-index convention matches [`Gate`]: the first target is
/// the most significant bit.
#[derive(Clone)]
pub struct ClassicalOp {
    name: String,
    width: usize,
    f: Arc<BitMap>,
}

/// Bijectivity is checked exhaustively up to this width.
const CHECK_WIDTH: usize = 20;

impl ClassicalOp {
    pub fn new<F>(name: impl Into<String>, width: usize, f: F) -> Result<ClassicalOp>
    where
        F: Fn(u64) -> u64 + Send + Sync + 'static,
    {
        let name = name.into();
        if width == 0 || width > 63 {
            return Err(Error::InvalidParameter(format!("{name}: width {width}")));
        }
        if width <= CHECK_WIDTH {
            let size = 1usize << width;
            let mut seen = vec![false; size];
            for s in 0..size as u64 {
                let t = f(s) as usize;
                if t >= size || seen[t] {
                    return Err(Error::NotReversible(name));
                }
                seen[t] = true;
            }
        }
        Ok(ClassicalOp {
            name,
            width,
            f: Arc::new(f),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn eval(&self, s: u64) -> u64 {
        (self.f)(s)
    }
}

impl fmt::Debug for ClassicalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalOp")
            .field("name", &self.name)
            .field("width", &self.width)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Operation {
    Gate(Gate),
    Classical(ClassicalOp),
}

impl Operation {
    pub fn arity(&self) -> usize {
        match self {
            Operation::Gate(g) => g.arity(),
            Operation::Classical(c) => c.width(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Operation::Gate(g) => g.name(),
            Operation::Classical(c) => c.name().to_string(),
        }
    }
}

impl From<Gate> for Operation {
    fn from(g: Gate) -> Operation {
        Operation::Gate(g)
    }
}

impl From<ClassicalOp> for Operation {
    fn from(c: ClassicalOp) -> Operation {
        Operation::Classical(c)
    }
}

#[derive(Debug, Clone)]
pub struct Step {
    pub time: usize,
    pub op: Operation,
    pub targets: Vec<usize>,
}

/// Qubits that are no longer written after `after` and are used only as
/// computational-basis controls from then on. Deferred-sampling runs may
/// collapse them; exact runs ignore these marks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapsePoint {
    /// Layer after which the qubits may be sampled; `None` means before the first layer.
    pub after: Option<usize>,
    pub qubits: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Circuit {
    num_qubits: usize,
    input_labels: Vec<bool>,
    layers: Vec<Vec<Step>>,
    frontier: Vec<usize>,
    floor: usize,
    collapses: Vec<CollapsePoint>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Circuit {
        Circuit {
            num_qubits,
            input_labels: vec![false; num_qubits],
            frontier: vec![0; num_qubits],
            ..Circuit::default()
        }
    }

    pub fn with_labels(labels: &[bool]) -> Circuit {
        let mut c = Circuit::new(labels.len());
        c.input_labels = labels.to_vec();
        c
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn input_labels(&self) -> &[bool] {
        &self.input_labels
    }

    pub fn set_input_label(&mut self, qubit: usize, bit: bool) -> Result<()> {
        self.check_qubit(qubit)?;
        self.input_labels[qubit] = bit;
        Ok(())
    }

    /// Adds `count` fresh qubits in |0⟩ and returns their indices.
    pub fn alloc(&mut self, count: usize) -> Vec<usize> {
        let start = self.num_qubits;
        self.num_qubits += count;
        self.input_labels.resize(self.num_qubits, false);
        self.frontier.resize(self.num_qubits, self.floor);
        (start..self.num_qubits).collect()
    }

    pub fn alloc_one(&mut self) -> usize {
        self.alloc(1)[0]
    }

    /// Number of layers.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Step>] {
        &self.layers
    }

    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.layers.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn collapse_points(&self) -> &[CollapsePoint] {
        &self.collapses
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check(&self, op: &Operation, targets: &[usize]) -> Result<()> {
        super::backend::check_targets(op.name(), op.arity(), targets, self.num_qubits)
    }

    fn place(&mut self, time: usize, op: Operation, targets: &[usize]) {
        while self.layers.len() <= time {
            self.layers.push(Vec::new());
        }
        for &q in targets {
            self.frontier[q] = self.frontier[q].max(time + 1);
        }
        self.layers[time].push(Step {
            time,
            op,
            targets: targets.to_vec(),
        });
    }

    /// Appends an operation at the earliest layer after every earlier
    /// operation on its qubits (and after the last barrier). Returns the layer.
    pub fn push_op(&mut self, op: impl Into<Operation>, targets: &[usize]) -> Result<usize> {
        let op = op.into();
        self.check(&op, targets)?;
        let time = targets
            .iter()
            .map(|&q| self.frontier[q])
            .max()
            .unwrap_or(0)
            .max(self.floor);
        self.place(time, op, targets);
        Ok(time)
    }

    pub fn push(&mut self, gate: Gate, targets: &[usize]) -> Result<usize> {
        self.push_op(gate, targets)
    }

    /// Places an operation at an explicit layer.
    pub fn push_at(
        &mut self,
        time: usize,
        op: impl Into<Operation>,
        targets: &[usize],
    ) -> Result<()> {
        let op = op.into();
        self.check(&op, targets)?;
        if let Some(layer) = self.layers.get(time) {
            for step in layer {
                if let Some(&q) = step.targets.iter().find(|q| targets.contains(q)) {
                    return Err(Error::InvalidParameter(format!(
                        "qubit {q} is already used at time {time}"
                    )));
                }
            }
        }
        if let Some(&q) = targets.iter().find(|&&q| self.frontier[q] > time) {
            return Err(Error::InvalidParameter(format!(
                "qubit {q} is used after time {time}; steps must be in time order"
            )));
        }
        self.place(time, op, targets);
        Ok(())
    }

    /// Later operations start after every operation placed so far.
    pub fn barrier(&mut self) {
        self.floor = self.layers.len();
        for f in self.frontier.iter_mut() {
            *f = (*f).max(self.floor);
        }
    }

    /// Records that `qubits` may be sampled once their last write has happened.
    pub fn mark_collapse(&mut self, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let after = qubits
            .iter()
            .map(|&q| self.frontier[q])
            .max()
            .and_then(|f| f.checked_sub(1));
        self.collapses.push(CollapsePoint {
            after,
            qubits: qubits.to_vec(),
        });
        Ok(())
    }

    /// Appends `other`, mapping its qubit i to `map[i]`, scheduling ASAP.
    pub fn append(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.num_qubits {
            return Err(Error::SizeMismatch(map.len(), other.num_qubits));
        }
        let remap = |qs: &[usize]| qs.iter().map(|&q| map[q]).collect::<Vec<_>>();
        for cp in other.collapses.iter().filter(|c| c.after.is_none()) {
            self.mark_collapse(&remap(&cp.qubits))?;
        }
        for (t, layer) in other.layers.iter().enumerate() {
            for step in layer {
                self.push_op(step.op.clone(), &remap(&step.targets))?;
            }
            for cp in other.collapses.iter().filter(|c| c.after == Some(t)) {
                self.mark_collapse(&remap(&cp.qubits))?;
            }
        }
        Ok(())
    }

    /// First and last layer in which each qubit is touched.
    pub fn usage(&self) -> Vec<Option<(usize, usize)>> {
        let mut usage: Vec<Option<(usize, usize)>> = vec![None; self.num_qubits];
        for step in self.steps() {
            for &q in &step.targets {
                usage[q] = Some(match usage[q] {
                    None => (step.time, step.time),
                    Some((a, _)) => (a, step.time),
                });
            }
        }
        usage
    }

    /// Per layer, which qubits are touched.
    pub(crate) fn busy_map(&self) -> Vec<Vec<bool>> {
        self.layers
            .iter()
            .map(|layer| {
                let mut busy = vec![false; self.num_qubits];
                for step in layer {
                    for &q in &step.targets {
                        busy[q] = true;
                    }
                }
                busy
            })
            .collect()
    }
}
