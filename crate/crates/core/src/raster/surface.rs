use std::collections::HashSet;

use rayon::prelude::*;

use super::{BinaryVolume, LabelVolume};
use crate::minsurf::Surface;
use crate::voronoi::CellComplex;

/// Unordered generator pairs `(j, k)`, `j < k`, whose shared facet belongs to the surface.
/// Surface facets on the cuboid boundary have a single cell and contribute no pair.
pub fn surface_pairs(k: &CellComplex, s: &Surface) -> HashSet<(u32, u32)> {
    let cells = k.facet_cells();
    s.facets
        .iter()
        .filter_map(|&(f, _)| match cells[f].as_slice() {
            &[a, b] => Some((a.min(b) as u32, a.max(b) as u32)),
            _ => None,
        })
        .collect()
}

/// Marks every voxel that has a 26-neighbour whose label forms a surface pair with its own.
pub fn rasterize_surface(labels: &LabelVolume, pairs: &HashSet<(u32, u32)>) -> BinaryVolume {
    let dims = labels.dims();
    let mut out = BinaryVolume::new(dims);
    if pairs.is_empty() || out.is_empty() {
        return out;
    }
    let slice = out.slice_len();
    out.data_mut().par_chunks_mut(slice).enumerate().for_each(|(x, s)| {
        for y in 0..dims[1] {
            for z in 0..dims[2] {
                let i = labels.index(x, y, z);
                let l = labels.data()[i];
                let hit = labels.neighbors26(i).any(|n| {
                    let m = labels.data()[n];
                    m != l && pairs.contains(&(l.min(m), l.max(m)))
                });
                s[y * dims[2] + z] = u8::from(hit);
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_pairs_give_empty_volume() {
        let labels = LabelVolume::from_vec([2, 2, 2], (0..8).collect()).unwrap();
        assert_eq!(rasterize_surface(&labels, &HashSet::new()).foreground(), 0);
    }

    #[test]
    fn two_label_split_marks_both_sides() {
        let dims = [10, 10, 10];
        let mut labels = LabelVolume::new(dims);
        for i in 0..labels.len() {
            let [x, _, _] = labels.coords(i);
            labels.data_mut()[i] = u32::from(x >= 5);
        }
        let pairs: HashSet<(u32, u32)> = [(0, 1)].into_iter().collect();
        let j = rasterize_surface(&labels, &pairs);
        assert_eq!(j.foreground(), 200);
        for i in 0..j.len() {
            let [x, _, _] = j.coords(i);
            assert_eq!(j.data()[i], u8::from(x == 4 || x == 5));
        }
    }
}
