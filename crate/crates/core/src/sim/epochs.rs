//! Several epochs observed together.

use crate::error::{Error, Result};
use crate::qif::{self, Channel, Label};
use crate::topics::{TopicAssignment, TopicsChannels, TopicsParams};

/// Per-epoch assignments over one taxonomy, all epochs covering the same
/// users. Epochs are stored with rows in the first epoch's user order.
#[derive(Clone, Debug)]
pub struct EpochWorld {
    epochs: Vec<(TopicAssignment, TopicsParams)>,
}

impl EpochWorld {
    pub fn new(epochs: Vec<(TopicAssignment, TopicsParams)>) -> Result<Self> {
        let Some((first, _)) = epochs.first() else {
            return Err(Error::BadParams("at least one epoch is required".into()));
        };
        let users = first.histories().to_vec();
        let taxonomy = first.taxonomy().to_vec();
        let mut out = Vec::with_capacity(epochs.len());
        for (i, (assignment, params)) in epochs.into_iter().enumerate() {
            if assignment.taxonomy() != taxonomy.as_slice() {
                return Err(Error::ParamMismatch(format!("epoch {i} uses a different taxonomy")));
            }
            let mut entries = Vec::with_capacity(users.len());
            for u in &users {
                let set = assignment
                    .set_of(u)
                    .ok_or_else(|| Error::ParamMismatch(format!("epoch {i} has no entry for user {u}")))?;
                entries.push((u.clone(), set.clone()));
            }
            if assignment.histories().len() != users.len() {
                return Err(Error::ParamMismatch(format!("epoch {i} covers a different set of users")));
            }
            out.push((TopicAssignment::new(entries, taxonomy.clone())?, params));
        }
        Ok(EpochWorld { epochs: out })
    }

    /// The same assignment and parameters repeated `k` times.
    pub fn repeated(assignment: TopicAssignment, params: TopicsParams, k: usize) -> Result<Self> {
        Self::new(vec![(assignment, params); k])
    }

    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn users(&self) -> &[Label] {
        self.epochs[0].0.histories()
    }

    pub fn epochs(&self) -> &[(TopicAssignment, TopicsParams)] {
        &self.epochs
    }
}

/// Privacy: parallel composition of each epoch's `C_T` (rows are users).
/// Utility: Kronecker product of each epoch's report channel (rows are
/// tuples of top-sets).
pub fn multi_epoch_channels(world: &EpochWorld) -> Result<(Channel, Channel)> {
    let mut privacy: Option<Channel> = None;
    let mut utility: Option<Channel> = None;
    for (assignment, params) in world.epochs() {
        let ch = TopicsChannels::build(assignment, params)?;
        privacy = Some(match privacy {
            None => ch.complete,
            Some(acc) => qif::parallel(&acc, &ch.complete)?,
        });
        utility = Some(match utility {
            None => ch.report,
            Some(acc) => qif::kronecker(&acc, &ch.report)?,
        });
    }
    match (privacy, utility) {
        (Some(p), Some(u)) => Ok((p, u)),
        _ => Err(Error::BadParams("at least one epoch is required".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qif::bayes_capacity;
    use crate::topics::TopSet;

    fn assignment(pairs: &[(&str, &[&str])], taxonomy: &[&str]) -> TopicAssignment {
        TopicAssignment::new(
            pairs.iter().map(|(u, s)| (Label::new(*u).unwrap(), TopSet::from_strs(s).unwrap())).collect(),
            Label::seq(taxonomy).unwrap(),
        )
        .unwrap()
    }

    const TAX: &[&str] = &["A", "B", "C", "D"];

    #[test]
    fn one_epoch_is_identity_fold() {
        let a = assignment(&[("u", &["A"]), ("v", &["B"])], TAX);
        let params = a.params(0.2).unwrap();
        let world = EpochWorld::repeated(a.clone(), params, 1).unwrap();
        let (p, u) = multi_epoch_channels(&world).unwrap();
        let single = TopicsChannels::build(&a, &params).unwrap();
        assert_eq!(p, single.complete);
        assert_eq!(u, single.report);
    }

    #[test]
    fn disjoint_epochs_leak_more() {
        let e1 = assignment(&[("a", &["A"]), ("b", &["A"]), ("c", &["B"]), ("d", &["B"])], TAX);
        let e2 = assignment(&[("a", &["C"]), ("c", &["C"]), ("b", &["D"]), ("d", &["D"])], TAX);
        let p1 = e1.params(0.1).unwrap();
        let p2 = e2.params(0.1).unwrap();
        let single1 = bayes_capacity(&TopicsChannels::build(&e1, &p1).unwrap().complete);
        let single2 = bayes_capacity(&TopicsChannels::build(&e2, &p2).unwrap().complete);
        let world = EpochWorld::new(vec![(e1, p1), (e2, p2)]).unwrap();
        let (p, u) = multi_epoch_channels(&world).unwrap();
        let both = bayes_capacity(&p);
        assert!(both > single1 + 1e-9 && both > single2 + 1e-9);
        assert_eq!(u.n_rows(), 4);
    }

    #[test]
    fn mismatched_users_rejected() {
        let e1 = assignment(&[("a", &["A"]), ("b", &["B"])], TAX);
        let e2 = assignment(&[("a", &["A"]), ("z", &["B"])], TAX);
        let p = e1.params(0.1).unwrap();
        assert!(matches!(EpochWorld::new(vec![(e1, p), (e2, p)]), Err(Error::ParamMismatch(_))));
    }

    #[test]
    fn rows_follow_first_epoch() {
        let e1 = assignment(&[("a", &["A"]), ("b", &["B"])], TAX);
        let e2 = assignment(&[("b", &["A"]), ("a", &["B"])], TAX);
        let p = e1.params(0.1).unwrap();
        let world = EpochWorld::new(vec![(e1, p), (e2, p)]).unwrap();
        assert_eq!(world.epochs()[1].0.histories(), world.users());
    }
}
