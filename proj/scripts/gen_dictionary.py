"""Emits the built-in tag dictionary table from pydicom's data dictionary.

Usage: python3 scripts/gen_dictionary.py > src/dicom/dictionary_table.inc
       python3 scripts/gen_dictionary.py --reference > tests/data/dictionary_reference.tsv
"""
import sys
from pydicom.datadict import DicomDictionary, keyword_for_tag

TAGS = [
    # command group
    0x00000000, 0x00000002, 0x00000100, 0x00000110, 0x00000120, 0x00000600,
    0x00000700, 0x00000800, 0x00000900, 0x00000901, 0x00000902, 0x00001000,
    0x00001020, 0x00001021, 0x00001022, 0x00001023,
    # file meta
    0x00020000, 0x00020001, 0x00020002, 0x00020003, 0x00020010, 0x00020012,
    0x00020013, 0x00020016,
    # identification
    0x00080005, 0x00080008, 0x00080012, 0x00080013, 0x00080016, 0x00080018,
    0x00080020, 0x00080021, 0x00080022, 0x00080023, 0x00080030, 0x00080031,
    0x00080032, 0x00080033, 0x00080050, 0x00080052, 0x00080054, 0x00080056,
    0x00080060, 0x00080061, 0x00080062, 0x00080064, 0x00080070, 0x00080080,
    0x00080081, 0x00080090, 0x00081010, 0x00081030, 0x0008103E, 0x00081040,
    0x00081048, 0x00081050, 0x00081060, 0x00081070, 0x00081080, 0x00081090,
    0x00081110, 0x00081111, 0x00081140, 0x00081150, 0x00081155, 0x00082111,
    0x00082218, 0x00080100, 0x00080102, 0x00080104, 0x00080105,
    # patient
    0x00100010, 0x00100020, 0x00100021, 0x00100030, 0x00100032, 0x00100040,
    0x00101000, 0x00101001, 0x00101010, 0x00101020, 0x00101030, 0x00102160,
    0x00104000, 0x00102180, 0x001021B0,
    # acquisition
    0x00180010, 0x00180015, 0x00180020, 0x00180021, 0x00180022, 0x00180023,
    0x00180050, 0x00180060, 0x00180080, 0x00180081, 0x00180082, 0x00180083,
    0x00180084, 0x00180087, 0x00180088, 0x00180091, 0x00181000, 0x00181020,
    0x00181030, 0x00181100, 0x00181110, 0x00181111, 0x00181120, 0x00181150,
    0x00181151, 0x00181152, 0x00181160, 0x00181210, 0x00181314, 0x00185100,
    # relationship
    0x0020000D, 0x0020000E, 0x00200010, 0x00200011, 0x00200012, 0x00200013,
    0x00200020, 0x00200032, 0x00200037, 0x00200052, 0x00201002, 0x00201040,
    0x00201041, 0x00201206, 0x00201208, 0x00201209, 0x00204000,
    # image pixel
    0x00280002, 0x00280004, 0x00280008, 0x00280010, 0x00280011, 0x00280030,
    0x00280100, 0x00280101, 0x00280102, 0x00280103, 0x00281050, 0x00281051,
    0x00281052, 0x00281053, 0x00281054, 0x00282110,
    # study
    0x00321032, 0x00321060, 0x00324000, 0x00400244, 0x00400245, 0x00400253,
    0x00400254, 0x00400260, 0x00402016, 0x00402017,
    # misc
    0x0008002A, 0x00081163, 0x00082134, 0x00089459, 0x00109431, 0x00180013,
    0x00181009, 0x00186020, 0x00186022, 0x00189219, 0x00282000, 0x00400280,
    0x00540081, 0x00880140, 0x20500020, 0x7FE00010,
]

def main():
    reference = "--reference" in sys.argv
    seen = set()
    for tag in sorted(TAGS):
        assert tag not in seen, hex(tag)
        seen.add(tag)
        vr, vm, name, retired, keyword = DicomDictionary[tag]
        if vr == "OB or OW":
            vr = "OW"
        assert len(vr) == 2, (hex(tag), vr)
        assert keyword == keyword_for_tag(tag)
        g, e = tag >> 16, tag & 0xFFFF
        if reference:
            print(f"{tag:08X}\t{keyword}\t{vr}")
        else:
            print(f"    {{Tag{{0x{g:04X}, 0x{e:04X}}}, \"{keyword}\", Vr::{vr}}},")

if __name__ == "__main__":
    main()
