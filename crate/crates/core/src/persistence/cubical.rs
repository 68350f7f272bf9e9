//! Filtered cubical complex over an image grid and its boundary-matrix
//! reduction.
//!
//! Cells of the V-construction: one vertex per pixel at its height, one edge
//! per 4-neighbor pair at the max of its endpoints, one square per 2x2 block
//! at the max of its corners. Cells are totally ordered by
//! (value, dimension, kind, row, col); ties in value put faces before
//! cofaces, and the remaining lexicographic tie-break fixes a deterministic
//! reduction order (the resulting diagram does not depend on it).
//!
//! Reduction runs over the two-element field with sparse columns, processing
//! squares before edges so that every edge paired as the birth of a 1-cycle
//! can be cleared from the 0-dimensional stage.

use super::{FiltrationConfig, PersistenceDiagram};
use crate::error::Result;
use crate::grid::Grid;

/// Cell kinds, in tie-break order within a dimension.
const VERTEX: u8 = 0;
const H_EDGE: u8 = 1;
const V_EDGE: u8 = 2;
const SQUARE: u8 = 3;

struct Cell {
    value: f64,
    dim: u8,
    kind: u8,
    r: u32,
    c: u32,
}

struct Complex {
    /// Cells in filtration order.
    cells: Vec<Cell>,
    /// Filtration-order position of each cell, by kind.
    pos_vertex: Vec<u32>,
    pos_hedge: Vec<u32>,
    pos_vedge: Vec<u32>,
    rows: usize,
    cols: usize,
}

impl Complex {
    fn build(grid: &Grid) -> Complex {
        let (rows, cols) = (grid.rows(), grid.cols());
        let n_vertices = rows * cols;
        let n_hedges = rows * (cols - 1);
        let n_vedges = (rows - 1) * cols;
        let n_squares = (rows - 1) * (cols - 1);
        let total = n_vertices + n_hedges + n_vedges + n_squares;

        let mut cells = Vec::with_capacity(total);
        for r in 0..rows {
            for c in 0..cols {
                cells.push(Cell {
                    value: grid.get(r, c),
                    dim: 0,
                    kind: VERTEX,
                    r: r as u32,
                    c: c as u32,
                });
            }
        }
        for r in 0..rows {
            for c in 0..cols - 1 {
                cells.push(Cell {
                    value: grid.get(r, c).max(grid.get(r, c + 1)),
                    dim: 1,
                    kind: H_EDGE,
                    r: r as u32,
                    c: c as u32,
                });
            }
        }
        for r in 0..rows - 1 {
            for c in 0..cols {
                cells.push(Cell {
                    value: grid.get(r, c).max(grid.get(r + 1, c)),
                    dim: 1,
                    kind: V_EDGE,
                    r: r as u32,
                    c: c as u32,
                });
            }
        }
        for r in 0..rows - 1 {
            for c in 0..cols - 1 {
                let v = grid
                    .get(r, c)
                    .max(grid.get(r, c + 1))
                    .max(grid.get(r + 1, c))
                    .max(grid.get(r + 1, c + 1));
                cells.push(Cell {
                    value: v,
                    dim: 2,
                    kind: SQUARE,
                    r: r as u32,
                    c: c as u32,
                });
            }
        }

        let mut order: Vec<u32> = (0..total as u32).collect();
        order.sort_by(|&a, &b| {
            let ca = &cells[a as usize];
            let cb = &cells[b as usize];
            ca.value
                .partial_cmp(&cb.value)
                .unwrap()
                .then(ca.dim.cmp(&cb.dim))
                .then(ca.kind.cmp(&cb.kind))
                .then(ca.r.cmp(&cb.r))
                .then(ca.c.cmp(&cb.c))
        });

        let mut pos_vertex = vec![0u32; n_vertices];
        let mut pos_hedge = vec![0u32; n_hedges];
        let mut pos_vedge = vec![0u32; n_vedges];
        let mut sorted = Vec::with_capacity(total);
        for (pos, &old) in order.iter().enumerate() {
            let cell = &cells[old as usize];
            let (r, c) = (cell.r as usize, cell.c as usize);
            match cell.kind {
                VERTEX => pos_vertex[r * cols + c] = pos as u32,
                H_EDGE => pos_hedge[r * (cols - 1) + c] = pos as u32,
                V_EDGE => pos_vedge[r * cols + c] = pos as u32,
                _ => {}
            }
            sorted.push(Cell {
                value: cell.value,
                dim: cell.dim,
                kind: cell.kind,
                r: cell.r,
                c: cell.c,
            });
        }

        Complex {
            cells: sorted,
            pos_vertex,
            pos_hedge,
            pos_vedge,
            rows,
            cols,
        }
    }

    /// Boundary of a cell as sorted filtration positions.
    fn boundary(&self, cell: &Cell) -> Vec<u32> {
        let (r, c) = (cell.r as usize, cell.c as usize);
        let cols = self.cols;
        let mut b = match cell.kind {
            VERTEX => Vec::new(),
            H_EDGE => vec![self.pos_vertex[r * cols + c], self.pos_vertex[r * cols + c + 1]],
            V_EDGE => vec![self.pos_vertex[r * cols + c], self.pos_vertex[(r + 1) * cols + c]],
            SQUARE => vec![
                self.pos_hedge[r * (cols - 1) + c],
                self.pos_hedge[(r + 1) * (cols - 1) + c],
                self.pos_vedge[r * cols + c],
                self.pos_vedge[r * cols + c + 1],
            ],
            _ => unreachable!(),
        };
        b.sort_unstable();
        b
    }
}

/// Symmetric difference of two sorted index lists (addition over F2).
fn add_columns(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(super) fn reduce_grid(
    grid: &Grid,
    max_dim: usize,
    config: FiltrationConfig,
) -> Result<Vec<PersistenceDiagram>> {
    let complex = Complex::build(grid);
    let total = complex.cells.len();
    let global_max = grid.max();
    let _ = (complex.rows, complex.cols);

    // pivot[p] = index into `reduced` of the column whose lowest entry is p.
    let mut pivot: Vec<u32> = vec![u32::MAX; total];
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut cleared = vec![false; total];

    let mut h1_pairs: Vec<(f64, f64)> = Vec::new();
    let mut h0_pairs: Vec<(f64, f64)> = Vec::new();

    // Square pass. Each square kills the 1-cycle created by the edge at the
    // lowest entry of its reduced column; that edge is cleared below.
    for cell in &complex.cells {
        if cell.dim != 2 {
            continue;
        }
        let mut col = complex.boundary(cell);
        let low = loop {
            let low = *col.last().expect("square column cannot vanish on a grid");
            let p = pivot[low as usize];
            if p == u32::MAX {
                break low;
            }
            col = add_columns(&col, &reduced[p as usize]);
        };
        pivot[low as usize] = reduced.len() as u32;
        reduced.push(col);
        cleared[low as usize] = true;
        h1_pairs.push((complex.cells[low as usize].value, cell.value));
    }

    // Edge pass. Cleared edges are exactly the 1-cycle creators, whose
    // columns would reduce to zero; every remaining edge pairs a vertex.
    for (pos, cell) in complex.cells.iter().enumerate() {
        if cell.dim != 1 || cleared[pos] {
            continue;
        }
        let mut col = complex.boundary(cell);
        let low = loop {
            let low = *col
                .last()
                .expect("non-cleared edge column cannot vanish on a grid");
            let p = pivot[low as usize];
            if p == u32::MAX {
                break low;
            }
            col = add_columns(&col, &reduced[p as usize]);
        };
        pivot[low as usize] = reduced.len() as u32;
        reduced.push(col);
        h0_pairs.push((complex.cells[low as usize].value, cell.value));
    }

    if !config.keep_zero_persistence {
        h0_pairs.retain(|&(b, d)| b != d);
        h1_pairs.retain(|&(b, d)| b != d);
    }
    // The unpaired vertex is the filtration-minimal one: the essential
    // component, finitized at the global maximum and always kept.
    h0_pairs.push((grid.min(), global_max));

    let mut out = vec![PersistenceDiagram::new(0, h0_pairs, global_max)?];
    if max_dim >= 1 {
        out.push(PersistenceDiagram::new(1, h1_pairs, global_max)?);
    }
    Ok(out)
}
