//! Time-vertex signals and the graph/time difference operators.
//!
//! A finite time-vertex graph signal is an `N x T` real matrix: each row is
//! the time series observed at one vertex, each column a static graph signal.
//! This module holds that matrix together with the oriented incidence matrix
//! `Q`, the Laplacian `L = Q Q^T`, the forward difference operators `D1` and
//! `D2`, and the smoothness diagnostics built from them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense `N x T` real signal matrix with validated finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeVertexSignal {
    data: DMatrix<f64>,
}

impl TimeVertexSignal {
    /// Wraps a dense matrix, rejecting empty shapes and non-finite entries.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::DimensionMismatch {
                context: "TimeVertexSignal::new",
                expected: "N >= 1 and T >= 1".into(),
                actual: format!("{} x {}", data.nrows(), data.ncols()),
            });
        }
        for j in 0..data.ncols() {
            for i in 0..data.nrows() {
                if !data[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { data })
    }

    /// Builds a signal from row-major data.
    pub fn from_rows(n: usize, t: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * t {
            return Err(Error::DimensionMismatch {
                context: "TimeVertexSignal::from_rows",
                expected: format!("{} values", n * t),
                actual: format!("{}", values.len()),
            });
        }
        Self::new(DMatrix::from_row_slice(n, t, values))
    }

    /// Number of vertices (rows).
    pub fn num_vertices(&self) -> usize {
        self.data.nrows()
    }

    /// Number of time steps (columns).
    pub fn num_steps(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }
}

/// Undirected graph with a fixed (arbitrary) edge orientation, stored as the
/// oriented incidence matrix `Q` and the Laplacian `L = Q Q^T`.
#[derive(Debug, Clone)]
pub struct GraphTopology {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    incidence: DMatrix<f64>,
    laplacian: DMatrix<f64>,
}

/// Builds the oriented incidence matrix and Laplacian from an edge list.
///
/// Edge `m = (u, v)` contributes `+1` at `(u, m)` and `-1` at `(v, m)`.
/// Self-loops, out-of-range endpoints, and duplicate undirected edges are
/// rejected with the offending edge index.
pub fn build_incidence(num_vertices: usize, edges: &[(usize, usize)]) -> Result<GraphTopology> {
    let mut seen = std::collections::HashSet::new();
    for (m, &(u, v)) in edges.iter().enumerate() {
        if u == v {
            return Err(Error::SelfLoop { index: m, vertex: u });
        }
        for vertex in [u, v] {
            if vertex >= num_vertices {
                return Err(Error::VertexOutOfRange {
                    index: m,
                    vertex,
                    num_vertices,
                });
            }
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::DuplicateEdge { index: m, u, v });
        }
    }

    let mut incidence = DMatrix::zeros(num_vertices, edges.len());
    for (m, &(u, v)) in edges.iter().enumerate() {
        incidence[(u, m)] = 1.0;
        incidence[(v, m)] = -1.0;
    }
    let laplacian = &incidence * incidence.transpose();

    Ok(GraphTopology {
        num_vertices,
        edges: edges.to_vec(),
        incidence,
        laplacian,
    })
}

impl GraphTopology {
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Oriented incidence matrix, `N x M`.
    pub fn incidence(&self) -> &DMatrix<f64> {
        &self.incidence
    }

    /// Graph Laplacian `L = Q Q^T`, `N x N`.
    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }
}

/// Evaluates the graph total variation `x^T L x` of a single column signal.
pub fn graph_tv_quadratic(topology: &GraphTopology, column: &DVector<f64>) -> Result<f64> {
    if column.len() != topology.num_vertices {
        return Err(Error::DimensionMismatch {
            context: "graph_tv_quadratic",
            expected: format!("vector of length {}", topology.num_vertices),
            actual: format!("{}", column.len()),
        });
    }
    Ok((column.transpose() * &topology.laplacian * column)[(0, 0)])
}

/// First and second order forward difference operators on the time axis,
/// stored column-wise so they apply from the right: `X D1`, `X D2`.
#[derive(Debug, Clone)]
pub struct TemporalOperators {
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
}

impl TemporalOperators {
    /// Builds `D1` (`T x (T-1)`) and `D2` (`T x (T-2)`) for `t >= 3`.
    pub fn new(t: usize) -> Result<Self> {
        if t < 3 {
            return Err(Error::TooFewTimeSteps {
                context: "TemporalOperators::new",
                required: 3,
                actual: t,
            });
        }
        let mut d1 = DMatrix::zeros(t, t - 1);
        for j in 0..t - 1 {
            d1[(j, j)] = -1.0;
            d1[(j + 1, j)] = 1.0;
        }
        let mut d2 = DMatrix::zeros(t, t - 2);
        for j in 0..t - 2 {
            d2[(j, j)] = 1.0;
            d2[(j + 1, j)] = -2.0;
            d2[(j + 2, j)] = 1.0;
        }
        Ok(Self { d1, d2 })
    }

    pub fn d1(&self) -> &DMatrix<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &DMatrix<f64> {
        &self.d2
    }
}

/// Forward temporal difference of the given order.
///
/// Order 1 yields `N x (T-1)` with entries `X(i, j+1) - X(i, j)`; order 2
/// yields `N x (T-2)` with entries `X(i, j) - 2 X(i, j+1) + X(i, j+2)`.
pub fn temporal_diff(signal: &TimeVertexSignal, order: usize) -> Result<DMatrix<f64>> {
    let (n, t) = (signal.num_vertices(), signal.num_steps());
    let x = signal.data();
    match order {
        1 => {
            if t < 2 {
                return Err(Error::TooFewTimeSteps {
                    context: "temporal_diff order 1",
                    required: 2,
                    actual: t,
                });
            }
            Ok(DMatrix::from_fn(n, t - 1, |i, j| -x[(i, j)] + x[(i, j + 1)]))
        }
        2 => {
            if t < 3 {
                return Err(Error::TooFewTimeSteps {
                    context: "temporal_diff order 2",
                    required: 3,
                    actual: t,
                });
            }
            Ok(DMatrix::from_fn(n, t - 2, |i, j| {
                x[(i, j)] - 2.0 * x[(i, j + 1)] + x[(i, j + 2)]
            }))
        }
        _ => Err(Error::ParamOutOfRange {
            name: "order",
            value: order as f64,
            range: "{1, 2}",
        }),
    }
}

/// Joint graph/time gradient field.
///
/// The graph component `Q^T X` is edge-indexed (`M x T`) while the time
/// component `X D1` is vertex-indexed (`N x (T-1)`); the two live on
/// different index sets, so both are kept at native shape. `max_norm` stacks
/// the components entrywise wherever both indices are valid
/// (`i < min(M, N)`, `j < T-1`) and falls back to the single-component
/// magnitude everywhere else.
#[derive(Debug, Clone)]
pub struct GradientField {
    /// `Q^T X`, one row per edge.
    pub graph_component: DMatrix<f64>,
    /// `X D1`, one row per vertex.
    pub time_component: DMatrix<f64>,
    /// Largest stacked gradient magnitude, as described above.
    pub max_norm: f64,
}

/// Computes both gradient components and the stacked max norm.
pub fn joint_gradient(signal: &TimeVertexSignal, topology: &GraphTopology) -> Result<GradientField> {
    if signal.num_vertices() != topology.num_vertices() {
        return Err(Error::DimensionMismatch {
            context: "joint_gradient",
            expected: format!("{} vertices", topology.num_vertices()),
            actual: format!("{}", signal.num_vertices()),
        });
    }
    let graph_component = topology.incidence().transpose() * signal.data();
    let time_component = if signal.num_steps() >= 2 {
        temporal_diff(signal, 1)?
    } else {
        DMatrix::zeros(signal.num_vertices(), 0)
    };

    let overlap_rows = graph_component.nrows().min(time_component.nrows());
    let overlap_cols = graph_component.ncols().min(time_component.ncols());
    let mut max_norm: f64 = 0.0;
    for j in 0..graph_component.ncols() {
        for i in 0..graph_component.nrows() {
            let g = graph_component[(i, j)];
            if i < overlap_rows && j < overlap_cols {
                let d = time_component[(i, j)];
                max_norm = max_norm.max((g * g + d * d).sqrt());
            } else {
                max_norm = max_norm.max(g.abs());
            }
        }
    }
    for j in 0..time_component.ncols() {
        for i in 0..time_component.nrows() {
            if i < overlap_rows && j < overlap_cols {
                continue; // already counted in the stacked pass
            }
            max_norm = max_norm.max(time_component[(i, j)].abs());
        }
    }

    Ok(GradientField {
        graph_component,
        time_component,
        max_norm,
    })
}

/// The three bounded smoothness quantities and their overall maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    /// `max_j |X(:,j)^T L X(:,j)|`.
    pub max_graph_quadratic: f64,
    /// Largest joint gradient magnitude.
    pub max_gradient_norm: f64,
    /// `max_{i,j} |(X D2)(i,j)|`.
    pub max_second_diff: f64,
    /// Maximum of the three.
    pub bound_c: f64,
}

/// Evaluates the smoothness diagnostics; requires `T >= 3` so the second
/// difference is defined.
pub fn smoothness_report(
    signal: &TimeVertexSignal,
    topology: &GraphTopology,
) -> Result<SmoothnessReport> {
    if signal.num_steps() < 3 {
        return Err(Error::TooFewTimeSteps {
            context: "smoothness_report",
            required: 3,
            actual: signal.num_steps(),
        });
    }
    let mut max_graph_quadratic: f64 = 0.0;
    for j in 0..signal.num_steps() {
        let column = DVector::from_column_slice(signal.data().column(j).as_slice());
        max_graph_quadratic = max_graph_quadratic.max(graph_tv_quadratic(topology, &column)?.abs());
    }
    let max_gradient_norm = joint_gradient(signal, topology)?.max_norm;
    let second = temporal_diff(signal, 2)?;
    let max_second_diff = second.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let bound_c = max_graph_quadratic.max(max_gradient_norm).max(max_second_diff);
    Ok(SmoothnessReport {
        max_graph_quadratic,
        max_gradient_norm,
        max_second_diff,
        bound_c,
    })
}
