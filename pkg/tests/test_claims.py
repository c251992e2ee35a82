"""Tests for the claims suite."""

import pytest


class TestClaims:
    """Individual claims and the runner."""

    @pytest.mark.parametrize("name", ["claim_a56", "claim_a55", "claim_a65",
                                      "claim_mn_table", "claim15", "claim_f_positivity"])
    def test_closed_form_claims_pass(self, name, zonal_rule):
        from yamabe_nodal import claims

        result = getattr(claims, name)(zonal_rule)
        assert result.passed, result

    def test_solution_identity_claim(self, zonal_rule):
        from yamabe_nodal.claims import claim_solution_identity

        assert claim_solution_identity(zonal_rule).passed

    def test_solution_identity_claim_detects_bad_constants(self, monkeypatch, zonal_rule):
        import dataclasses

        from yamabe_nodal.claims import claim_solution_identity
        from yamabe_nodal.sphere_geometry import SphereConstants

        original = SphereConstants.for_dimension

        def tampered(n):
            const = original(n)
            return dataclasses.replace(const, omega_n=const.omega_n * (1 + 1e-3))

        monkeypatch.setattr(SphereConstants, "for_dimension", staticmethod(tampered))
        result = claim_solution_identity(zonal_rule)
        assert not result.passed
        assert "n=3" in result.detail

    def test_ball_claim(self, zonal_rule):
        from yamabe_nodal.claims import claim_lemma31

        assert claim_lemma31(zonal_rule).passed

    def test_runner_records_errors_as_failures(self, monkeypatch, zonal_rule):
        from yamabe_nodal import claims
        from yamabe_nodal.errors import QuadratureError

        def broken(rule):
            raise QuadratureError("node is not finite", {"r": 0.0})

        monkeypatch.setattr(claims, "CLAIMS", [claims.claim_a65, broken])
        results = claims.run_claims(zonal_rule)
        assert [r.passed for r in results] == [True, False]
        assert results[1].name == "broken"
        assert results[1].computed == "QuadratureError"
        assert "r=0.0" in results[1].detail

    def test_certification_claims_are_named(self):
        from yamabe_nodal.claims import CLAIMS

        names = [c.__name__ for c in CLAIMS]
        assert "certify_3_9" in names
        assert "certify_4_7" in names

    @pytest.mark.slow
    def test_every_claim_passes(self, grid_rule):
        from yamabe_nodal.claims import run_claims

        results = run_claims(grid_rule)
        assert all(r.passed for r in results), [r.name for r in results if not r.passed]
