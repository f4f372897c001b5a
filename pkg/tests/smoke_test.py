
import json
import os
import shutil
import sys

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import run
from treegroups import tree_core
from treegroups.catalogs import GroupCase
from treegroups.conjugacy import find_conjugator_in_Wn
from treegroups.dynamics import FieldSpec, arith_description, critical_orbit
from treegroups.level_groups import closed_form_log2_order, contains, model_group, order_log2
from export.table_saver import save_table, load_table
from export.report_generator import generate_report, generate_report_json


def test_pipeline():
    print("Starting smoke test...")
    export_dir = "test_output"

    try:
        # 1. Classify a polynomial
        print("Testing orbit classification...")
        orbit = critical_orbit(-2, FieldSpec())
        print(f"x^2 - 2: {orbit.kind} (model {orbit.case})")
        assert orbit.case == GroupCase.prep(1, 2), "Wrong orbit class"
        case = GroupCase.prep(1, 3)

        # 2. Enumerate the model group
        print("Testing enumeration...")
        table = model_group(case, 4)
        log2 = order_log2(table)
        print(f"log2 |G_4| = {log2}")
        assert log2 == closed_form_log2_order(case, 4), "Order disagrees with closed form"

        # 3. Conjugacy inside W_4
        print("Testing conjugacy...")
        p = tree_core.from_key(4, int(table.sorted_keys()[-1]))
        c = tree_core.from_key(4, int(table.sorted_keys()[1]))
        witness = find_conjugator_in_Wn(p, tree_core.conjugate(c, p))
        assert witness is not None, "Conjugate pair not detected"

        # 4. Test Export
        print("Testing export...")
        if not os.path.exists(export_dir):
            os.makedirs(export_dir)

        table_path = save_table(table, output_path=os.path.join(export_dir, "group.txt"))
        print(f"Saved table to {table_path}")
        loaded = load_table(table_path)
        assert loaded.size == table.size, "Table changed on reload"
        assert contains(loaded, p), "Element lost on reload"

        # 5. Test Reports
        print("Testing report generation...")
        report_path = generate_report(table, case, 0.5,
                                      output_path=os.path.join(export_dir, "report.txt"))
        json_path = generate_report_json(table, case, 0.5,
                                         output_path=os.path.join(export_dir, "report.json"))
        assert os.path.exists(report_path), "Report not saved"
        with open(json_path) as f:
            assert json.load(f)['group']['matches_formula'] is True

        # 6. Arithmetic label
        report = arith_description(orbit, k=3)
        print(f"Arithmetic structure: {report.structure}, index {report.index_bound}")

        # 7. Command line
        print("Testing command line...")
        assert run(['hausdorff', '--case', str(case)]) == 0
        assert run(['verify', '--suite', 'hausdorff']) == 0

        print("\n✅ SMOKE TEST PASSED: All components functioning correctly.")

    except Exception as e:
        print(f"\n❌ SMOKE TEST FAILED: {str(e)}")
        import traceback
        traceback.print_exc()
        raise e

    finally:
        # Cleanup
        if os.path.exists(export_dir):
            shutil.rmtree(export_dir)


if __name__ == "__main__":
    test_pipeline()
