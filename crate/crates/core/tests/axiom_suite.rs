use jointrisk::{
    axiom_suite, h_vector, Axiom, ConfidenceBand, Copula, DistortionFn, JointRiskSpec, Result,
    TailKind,
};

#[test]
fn one_dimensional_suite_is_classic_choquet() {
    // in dimension 1 every copula is the identity and Γ is the Choquet integral
    let g = DistortionFn::cvar_ramp(0.75).unwrap();
    let factory = {
        let g = g.clone();
        move |c: &Copula| -> Result<JointRiskSpec> {
            Ok(JointRiskSpec::uniform(c.clone(), g.clone()))
        }
    };
    let c = Copula::independence(1).unwrap();
    let report = axiom_suite(&factory, &c, 5, 60).unwrap();
    assert!(report.all_passed(), "{report:?}");
    assert!(report.outcome(Axiom::A3).checks >= 60);

    let s = jointrisk::ScenarioSet::from_rows(vec![vec![1.0], vec![2.0], vec![4.0], vec![8.0]])
        .unwrap();
    let spec = JointRiskSpec::uniform(c, g);
    // CVaR_0.75 of four equally likely values is the largest one
    assert_eq!(h_vector(&s, &spec).unwrap().components, vec![8.0]);
    assert_eq!(jointrisk::gamma_survival_form(&s, &spec).unwrap(), 8.0);
}

#[test]
fn three_dimensional_mixture_suite_passes() {
    let factory = |c: &Copula| -> Result<JointRiskSpec> {
        let band = ConfidenceBand::new(0.9, 0.99)?;
        Ok(JointRiskSpec::mixture(c, band, &[TailKind::Cvar; 3], 12)?.0)
    };
    let report = axiom_suite(&factory, &Copula::gumbel(3, 2.0).unwrap(), 9, 20).unwrap();
    assert!(report.all_passed(), "{report:?}");
    assert_eq!(report.seed, 9);
}
