//! Hopcroft–Karp maximum bipartite matching.
//!
//! The containment decision tests whether every core pair can be assigned a
//! distinct common neighbor, which is a perfect matching question on the
//! (pairs x candidates) bipartite graph; this sits in the Monte Carlo hot
//! loop, hence the O(E sqrt(V)) algorithm rather than plain augmenting paths.

const UNMATCHED: usize = usize::MAX;

/// Maximum matching in a bipartite graph given as adjacency lists from the
/// left side (`adj[l]` lists right vertices). Returns `match_of_left` with
/// `None` for unmatched left vertices.
pub fn hopcroft_karp(adj: &[Vec<usize>], right_count: usize) -> Vec<Option<usize>> {
    let left_count = adj.len();
    let mut match_left = vec![UNMATCHED; left_count];
    let mut match_right = vec![UNMATCHED; right_count];
    let mut dist = vec![0u32; left_count];

    loop {
        // BFS from free left vertices to build layered distances.
        let mut queue = std::collections::VecDeque::new();
        for l in 0..left_count {
            if match_left[l] == UNMATCHED {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = u32::MAX;
            }
        }
        let mut found_augmenting = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = match_right[r];
                if next == UNMATCHED {
                    found_augmenting = true;
                } else if dist[next] == u32::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found_augmenting {
            break;
        }
        for l in 0..left_count {
            if match_left[l] == UNMATCHED {
                augment(adj, l, &mut match_left, &mut match_right, &mut dist);
            }
        }
    }

    match_left
        .into_iter()
        .map(|r| (r != UNMATCHED).then_some(r))
        .collect()
}

fn augment(
    adj: &[Vec<usize>],
    l: usize,
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [u32],
) -> bool {
    if dist[l] == u32::MAX {
        return false;
    }
    for &r in &adj[l] {
        let next = match_right[r];
        if next == UNMATCHED
            || (dist[next] == dist[l].wrapping_add(1)
                && augment(adj, next, match_left, match_right, dist))
        {
            match_left[l] = r;
            match_right[r] = l;
            return true;
        }
    }
    dist[l] = u32::MAX; // dead end, prune for this phase
    false
}

/// Size of the maximum matching.
pub fn max_matching_size(adj: &[Vec<usize>], right_count: usize) -> usize {
    hopcroft_karp(adj, right_count)
        .iter()
        .filter(|m| m.is_some())
        .count()
}
