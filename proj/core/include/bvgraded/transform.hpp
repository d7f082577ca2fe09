#pragma once

#include <string>
#include <vector>

#include "bvgraded/bv.hpp"
#include "bvgraded/dsl.hpp"

namespace bvg {

/// Sign convention of the graded Hamilton rules
///   p = pSign (-1)^{|q|} kappa dG/dq,   Q = qSign (-1)^{|P|} kappa dG/dP,
/// with |.| either the component parity or the total degree of the field.
struct HamiltonConvention {
  bool totalDegree = false;
  int pSign = -1;
  int qSign = 1;
};

struct ChartVariable {
  SymbolId symbol = kNoSymbol;
  SymbolId conjugate = kNoSymbol;
  int kappa = 1;
  int parity = 0;  // in the convention's sense
};

struct GeneratingFunction {
  std::string name;
  Expression body;  // top-form density of ghost -1
  std::vector<const JetField*> oldFields;
  std::vector<const JetField*> newFields;
  std::vector<RosterEntry> oldRoster;
  std::vector<RosterEntry> newRoster;
};

std::vector<ChartVariable> chartVariables(const std::vector<const JetField*>& fields,
                                          const std::vector<RosterEntry>& roster, const HamiltonConvention& conv);

/// Target components in terms of the mixed chart (q, P): pRules give the
/// conjugates of q, qRules the conjugates of P.
struct TransformationMap {
  std::string origin;
  std::vector<ChartVariable> oldVars, newVars;
  SubstitutionRules pRules;
  SubstitutionRules qRules;

  SubstitutionRules all() const;
};

TransformationMap deriveTransformation(const GeneratingFunction& g, const HamiltonConvention& conv = {});

/// Zero-residual check of the Hamilton relations for the derived rules.
CheckOutcome checkHamiltonResiduals(const GeneratingFunction& g, const TransformationMap& map,
                                    const HamiltonConvention& conv = {});

/// Residual of a printed relation lhs = rhs, both sides mapped to the mixed chart.
CheckOutcome checkRelation(const TransformationMap& map, const dsl::Tensor& lhs, const dsl::Tensor& rhs,
                           const std::string& label);

/// The even parameter t of the flow e^{t i_xi}.
SymbolId flowParameter();

/// Form-degree components of e^{t i_v} x, each a polynomial in the parameter t.
std::vector<dsl::Tensor> expandExpIota(SymbolId t, const dsl::Tensor& x, const Valued& v);

/// Coefficient of parameter^power (parameter even and undifferentiated).
Expression parameterCoefficient(const Expression& expr, SymbolId parameter, int power);
int parameterDegree(const Expression& expr, SymbolId parameter);

struct LemmaInput {
  dsl::Tensor superfield;  // the BF superfield B
  Valued xi;               // vector ghost of the gravity side
  dsl::Tensor triad;       // e of the gravity side
};

struct PullbackReport {
  CheckOutcome lambda0;
  CheckOutcome lambda1;
  CheckOutcome q0Vanishes, q1IsTriad, constantL;
  bool formal = false;
};

/// phi* S_new = S_old on the mixed chart. With superfield data the Lambda^1
/// coefficient goes through the constancy of L(t) = int Tr[(e^{t i_xi} B)^3];
/// without it every Lambda^k coefficient is pulled back directly.
PullbackReport pullbackAction(const TransformationMap& map, const Theory& oldTheory, const Theory& newTheory,
                              LambdaMode mode, const LemmaInput* lemma = nullptr);

/// The Lemma pieces alone: pulled-back components and dL/dt.
PullbackReport checkCosmologicalLemma(const TransformationMap& map, const LemmaInput& lemma);

/// Composition through the stationary point of
///   G1(P1, q2) + G2(p2, q3) - sum c p2 q2.
GeneratingFunction composeGenerating(const GeneratingFunction& g1, const GeneratingFunction& g2,
                                     const HamiltonConvention& conv = {});

/// deriveTransformation(composed) against the rule composition of the two maps.
CheckOutcome checkChainProperty(const GeneratingFunction& g1, const GeneratingFunction& g2,
                                const GeneratingFunction& composed, const HamiltonConvention& conv = {});

/// Q-intertwining: with W = Q_old on q and Q_new on P (both pulled to the
/// mixed chart), W maps every derived rule to the corresponding Q.
CheckOutcome checkSymplectomorphism(const TransformationMap& map, const Theory& oldTheory, const Theory& newTheory,
                                    LambdaMode mode = LambdaMode::Zero);

/// W applied to a printed rule's right-hand side against Q_new of its field.
CheckOutcome checkIntertwinedRule(const TransformationMap& map, const Theory& oldTheory, const Theory& newTheory,
                                  const JetField& field, const dsl::Tensor& rhs);

/// Identity generating function sum c P q over the given chart.
GeneratingFunction identityGenerating(const std::vector<const JetField*>& oldFields,
                                      const std::vector<RosterEntry>& oldRoster,
                                      const std::vector<const JetField*>& newFields,
                                      const std::vector<RosterEntry>& newRoster, const HamiltonConvention& conv = {});

}  // namespace bvg
