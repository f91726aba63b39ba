use std::fmt::Write as _;

use crate::channels::RandomUnitarySpec;
use crate::numerics::CMatrix;

/// `s_i U_i^{(a)} + s_j U_j^{(b)}` for one pair of arm unitaries.
#[derive(Clone, Debug)]
pub struct TableEntry {
    pub i: usize,
    pub j: usize,
    pub operator: CMatrix,
}

/// Sum of every pair of phased unitaries, row-major over `(i, j)`.
pub fn pairwise_operator_table(
    spec_a: &RandomUnitarySpec,
    spec_b: &RandomUnitarySpec,
) -> Vec<TableEntry> {
    let mut out = Vec::new();
    for (i, ea) in spec_a.entries().iter().enumerate() {
        for (j, eb) in spec_b.entries().iter().enumerate() {
            out.push(TableEntry {
                i,
                j,
                operator: &ea.phased_unitary() + &eb.phased_unitary(),
            });
        }
    }
    out
}

/// CSV with header `i,j,m00_re,m00_im,m01_re,...`, six decimals per entry.
pub fn table_csv(table: &[TableEntry]) -> String {
    let mut out = String::from("i,j,m00_re,m00_im,m01_re,m01_im,m10_re,m10_im,m11_re,m11_im\n");
    for e in table {
        write!(out, "{},{}", e.i, e.j).unwrap();
        for z in e.operator.as_slice() {
            write!(out, ",{:.6},{:.6}", z.re + 0.0, z.im + 0.0).unwrap();
        }
        out.push('\n');
    }
    out
}
