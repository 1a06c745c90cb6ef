//! Perfect matchings on the positive support of a square block.
//!
//! Rows are processed in increasing order. Each row first takes the
//! smallest free admissible column; failing that, an augmenting path is
//! searched depth-first with columns visited in increasing order. The
//! result is therefore a deterministic function of the support pattern.

/// Returns `row -> col` for a perfect matching of the bipartite graph with
/// an edge `(i, j)` whenever `admissible(i, j)`, or `None` if none exists.
pub(crate) fn perfect_matching<F>(n: usize, admissible: F) -> Option<Vec<usize>>
where
    F: Fn(usize, usize) -> bool,
{
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| admissible(i, j)).collect())
        .collect();
    let mut row_of_col: Vec<Option<usize>> = vec![None; n];
    let mut col_of_row: Vec<Option<usize>> = vec![None; n];

    for row in 0..n {
        if let Some(&col) = adjacency[row].iter().find(|&&c| row_of_col[c].is_none()) {
            row_of_col[col] = Some(row);
            col_of_row[row] = Some(col);
            continue;
        }
        let mut visited = vec![false; n];
        if !augment(row, &adjacency, &mut visited, &mut row_of_col, &mut col_of_row) {
            return None;
        }
    }
    col_of_row.into_iter().collect()
}

fn augment(
    row: usize,
    adjacency: &[Vec<usize>],
    visited: &mut [bool],
    row_of_col: &mut [Option<usize>],
    col_of_row: &mut [Option<usize>],
) -> bool {
    for &col in &adjacency[row] {
        if visited[col] {
            continue;
        }
        visited[col] = true;
        let free = match row_of_col[col] {
            None => true,
            Some(other) => augment(other, adjacency, visited, row_of_col, col_of_row),
        };
        if free {
            row_of_col[col] = Some(row);
            col_of_row[row] = Some(col);
            return true;
        }
    }
    false
}
