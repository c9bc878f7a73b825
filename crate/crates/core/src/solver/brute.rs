use std::collections::VecDeque;

use thiserror::Error;

use crate::jsp::{machine_operations, Instance, OpId, Time};

use super::earliest_feasible_start;

pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BruteForceError {
    #[error("{combinations} machine-sequence combinations exceed the cap of {cap}")]
    TooLarge { combinations: u64, cap: u64 },
}

/// Optimum by enumerating every per-machine total order.
///
/// Cyclic combinations are skipped; each acyclic one is timed semi-actively.
/// Shares nothing with the branch-and-bound search except the timing rule.
pub fn brute_force_optimum(instance: &Instance) -> Result<Time, BruteForceError> {
    brute_force_optimum_with_cap(instance, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn brute_force_optimum_with_cap(instance: &Instance, cap: u64) -> Result<Time, BruteForceError> {
    let ids: Vec<OpId> = instance.operations().map(|(id, _)| id).collect();
    let index = |id: OpId| ids.binary_search(&id).expect("operation id present");
    let machines: Vec<Vec<usize>> = machine_operations(instance)
        .into_values()
        .map(|set| set.into_iter().map(index).collect())
        .collect();

    let mut combinations: u64 = 1;
    for ops in &machines {
        for k in 1..=ops.len() as u64 {
            combinations = combinations.saturating_mul(k);
        }
    }
    if combinations > cap {
        return Err(BruteForceError::TooLarge { combinations, cap });
    }

    let perms: Vec<Vec<Vec<usize>>> = machines.iter().map(|ops| permutations(ops)).collect();
    let n = ids.len();
    let job_pred: Vec<Option<usize>> = ids
        .iter()
        .map(|id| (id.op > 0).then(|| index(OpId::new(id.job, id.op - 1))))
        .collect();
    let op_data: Vec<(usize, Time)> = ids
        .iter()
        .map(|&id| {
            let op = instance.operation(id).expect("operation present");
            (op.machine, op.duration)
        })
        .collect();

    let mut best: Option<Time> = None;
    let mut choice = vec![0usize; perms.len()];
    loop {
        let mut machine_pred = vec![None; n];
        for (m, &c) in choice.iter().enumerate() {
            for w in perms[m][c].windows(2) {
                machine_pred[w[1]] = Some(w[0]);
            }
        }
        if let Some(mk) = time_semi_active(instance, &op_data, &job_pred, &machine_pred) {
            best = Some(best.map_or(mk, |b| b.min(mk)));
        }

        // odometer
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Ok(best.unwrap_or(0));
            }
            choice[pos] += 1;
            if choice[pos] < perms[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Makespan of the semi-active schedule for fixed predecessors, or `None` when
/// the precedence graph has a cycle.
fn time_semi_active(
    instance: &Instance,
    op_data: &[(usize, Time)],
    job_pred: &[Option<usize>],
    machine_pred: &[Option<usize>],
) -> Option<Time> {
    let n = op_data.len();
    let mut indegree = vec![0u8; n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        for u in [job_pred[v], machine_pred[v]].into_iter().flatten() {
            succs[u].push(v);
            indegree[v] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut end = vec![0 as Time; n];
    let mut seen = 0;
    let mut makespan = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        let (machine, duration) = op_data[v];
        let job_ready = job_pred[v].map_or(0, |u| end[u]);
        let machine_ready = machine_pred[v].map_or(0, |u| end[u]);
        let start = earliest_feasible_start(machine_ready, job_ready, duration, instance.windows(machine));
        end[v] = start + duration;
        makespan = makespan.max(end[v]);
        for &w in &succs[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    (seen == n).then_some(makespan)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = items.to_vec();
    permute(&mut current, 0, &mut out);
    out
}

fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k + 1 >= v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsp::Operation;

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(&[]).len(), 1);
        assert_eq!(permutations(&[7]).len(), 1);
        assert_eq!(permutations(&[1, 2, 3, 4]).len(), 24);
    }

    #[test]
    fn single_machine_sum_is_order_invariant() {
        let inst = Instance::from_jobs(1, [(1, vec![Operation::new(0, 2)]), (2, vec![Operation::new(0, 3)])]).unwrap();
        assert_eq!(brute_force_optimum(&inst), Ok(5));
    }

    #[test]
    fn cap_is_enforced() {
        let jobs = (1..=11).map(|j| (j, vec![Operation::new(0, 1)]));
        let inst = Instance::from_jobs(1, jobs).unwrap();
        assert!(matches!(
            brute_force_optimum(&inst),
            Err(BruteForceError::TooLarge { .. })
        ));
    }
}
