"""Builds reference DICOM fixtures with pydicom for the codec tests.

Writes tests/data/ref_*.dcm plus ref_*.json dumps (pydicom's own reading of
each file) that the C++ tests compare against, and ref_net_vectors.json with
pynetdicom PDU/command bytes and pydicom's DICOM JSON encoding.
"""
import io
import json
import os
import sys

from pydicom.dataset import Dataset, FileMetaDataset
from pydicom.filewriter import write_dataset, dcmwrite
from pydicom.sequence import Sequence
from pydicom.uid import UID, ExplicitVRLittleEndian, ImplicitVRLittleEndian
from pydicom import dcmread
from pydicom.filebase import DicomBytesIO

OUT = sys.argv[1] if len(sys.argv) > 1 else "tests/data"


def element_bytes(keyword, value, implicit):
    ds = Dataset()
    setattr(ds, keyword, value)
    buf = DicomBytesIO()
    buf.is_little_endian = True
    buf.is_implicit_VR = implicit
    write_dataset(buf, ds)
    return buf.getvalue().hex()


def build_dataset(undefined_seq):
    ds = Dataset()
    ds.SOPClassUID = "1.2.840.10008.5.1.4.1.1.2"
    ds.SOPInstanceUID = "1.2.3.4.5.6.7"
    ds.StudyInstanceUID = "1.2.3.4"
    ds.SeriesInstanceUID = "1.2.3.4.5"
    ds.Modality = "CT"
    ds.PatientName = "Doe^John"
    ds.PatientID = "PID001"
    ds.ImageType = ["ORIGINAL", "PRIMARY", "AXIAL"]
    ds.StudyDate = "20200102"
    ds.Rows = 512
    ds.Columns = 256
    ds.PixelSpacing = ["0.5", "0.25"]
    ds.InstanceNumber = "7"
    ds.ExaminedBodyThickness = 12.5
    ds.TimeRange = [1.25, -3.5]
    ds.ReferencePixelX0 = -12
    ds.TagAngleSecondAxis = -3
    ds.InstitutionName = "ACME Hospital"
    item1 = Dataset()
    item1.ReferencedSOPClassUID = "1.2.840.10008.5.1.4.1.1.2"
    item1.ReferencedSOPInstanceUID = "1.2.3.9"
    inner = Dataset()
    inner.CodeValue = "T-D0050"
    inner.CodeMeaning = "Body"
    item1.AnatomicRegionSequence = Sequence([inner])
    item2 = Dataset()
    item2.ReferencedSOPClassUID = "1.2.840.10008.5.1.4.1.1.4"
    item2.ReferencedSOPInstanceUID = "1.2.3.10"
    ds.ReferencedImageSequence = Sequence([item1, item2])
    if undefined_seq:
        ds.ReferencedImageSequence.is_undefined_length = True
        for item in ds.ReferencedImageSequence:
            item.is_undefined_length_sequence_item = True
    ds.add_new(0x00090010, "LO", "ACME")
    ds.PixelData = bytes(range(16))
    ds["PixelData"].VR = "OW"
    return ds


def save(name, ds, ts):
    meta = FileMetaDataset()
    meta.MediaStorageSOPClassUID = ds.SOPClassUID
    meta.MediaStorageSOPInstanceUID = ds.SOPInstanceUID
    meta.TransferSyntaxUID = ts
    meta.ImplementationClassUID = "1.2.3.999"
    ds.file_meta = meta
    path = os.path.join(OUT, name + ".dcm")
    dcmwrite(path, ds, enforce_file_format=True)
    back = dcmread(path)
    dump = {}

    def walk(d, prefix):
        for elem in d:
            key = prefix + f"{elem.tag:08X}"
            if elem.VR == "SQ":
                dump[key] = {"vr": "SQ", "items": len(elem.value)}
                for i, item in enumerate(elem.value):
                    walk(item, key + f"[{i}].")
            elif elem.VR in ("OB", "OW", "UN"):
                dump[key] = {"vr": elem.VR, "bytes": bytes(elem.value).hex()}
            else:
                v = elem.value
                vals = list(v) if elem.VM > 1 else ([] if v in (None, "") else [v])
                dump[key] = {"vr": elem.VR, "values": [str(x) if not isinstance(x, (int, float)) else x for x in vals]}

    walk(back, "")
    with open(os.path.join(OUT, name + ".json"), "w") as f:
        json.dump({"transfer_syntax": str(back.file_meta.TransferSyntaxUID), "elements": dump}, f, indent=1, sort_keys=True)


def capture_associate_rq():
    """First PDU pynetdicom sends when it opens an association."""
    import socket
    import threading
    from pynetdicom import AE
    from pynetdicom.sop_class import Verification, CTImageStorage

    srv = socket.socket()
    srv.bind(("127.0.0.1", 0))
    srv.listen(1)
    got = {}

    def record():
        conn, _ = srv.accept()
        head = b""
        while len(head) < 6:
            head += conn.recv(6 - len(head))
        length = int.from_bytes(head[2:6], "big")
        body = b""
        while len(body) < length:
            body += conn.recv(length - len(body))
        got["pdu"] = head + body
        conn.close()

    t = threading.Thread(target=record)
    t.start()
    ae = AE(ae_title="REFSCU")
    ae.acse_timeout = 2
    ae.add_requested_context(Verification)
    ae.add_requested_context(CTImageStorage, ["1.2.840.10008.1.2.1", "1.2.840.10008.1.2"])
    ae.associate("127.0.0.1", srv.getsockname()[1], ae_title="MINIPACS", max_pdu=16384)
    t.join()
    srv.close()
    return got["pdu"].hex()


def net_vectors():
    from pydicom.dataset import Dataset
    from pynetdicom.dimse_messages import C_ECHO_RQ, C_ECHO_RSP
    from pynetdicom.dimse_primitives import C_ECHO
    from pynetdicom.dsutils import encode
    from pynetdicom.pdu import A_RELEASE_RP, A_RELEASE_RQ

    rq = C_ECHO()
    rq.MessageID = 7
    rq.AffectedSOPClassUID = "1.2.840.10008.1.1"
    rq_msg = C_ECHO_RQ()
    rq_msg.primitive_to_message(rq)
    rsp = C_ECHO()
    rsp.MessageIDBeingRespondedTo = 7
    rsp.AffectedSOPClassUID = "1.2.840.10008.1.1"
    rsp.Status = 0
    rsp_msg = C_ECHO_RSP()
    rsp_msg.primitive_to_message(rsp)

    ds = Dataset()
    ds.PatientName = "Silva^Rui"
    ds.Modality = "CT"
    ds.AccessionNumber = ""
    ds.InstanceNumber = "7"
    ds.SliceThickness = "2.5"
    return {
        "release_rq": A_RELEASE_RQ().encode().hex(),
        "release_rp": A_RELEASE_RP().encode().hex(),
        "echo_rq_command": encode(rq_msg.command_set, True, True).hex(),
        "echo_rsp_command": encode(rsp_msg.command_set, True, True).hex(),
        "associate_rq": capture_associate_rq(),
        "dicom_json": ds.to_json_dict(),
    }


def main():
    save("ref_explicit", build_dataset(False), ExplicitVRLittleEndian)
    save("ref_explicit_undef", build_dataset(True), ExplicitVRLittleEndian)
    save("ref_implicit", build_dataset(True), ImplicitVRLittleEndian)
    jpeg = UID("1.2.840.10008.1.2.4.50")
    assert jpeg.is_compressed and jpeg.is_encapsulated, "expected an encapsulated syntax"
    ds = build_dataset(False)
    del ds.PixelData
    save("ref_jpeg_baseline", ds, jpeg)
    assert str(dcmread(os.path.join(OUT, "ref_jpeg_baseline.dcm")).file_meta.TransferSyntaxUID) == str(jpeg)
    os.remove(os.path.join(OUT, "ref_jpeg_baseline.json"))

    vectors = {
        "explicit_modality_ct": element_bytes("Modality", "CT", False),
        "implicit_patient_name_doe": element_bytes("PatientName", "Doe^", True),
        "explicit_rows_512": element_bytes("Rows", 512, False),
        "explicit_image_type": element_bytes("ImageType", ["ORIGINAL", "PRIMARY"], False),
        "explicit_sop_uid_odd": element_bytes("SOPInstanceUID", "1.2.3", False),
        "explicit_patient_name_odd": element_bytes("PatientName", "Doe^J", False),
    }
    with open(os.path.join(OUT, "ref_element_vectors.json"), "w") as f:
        json.dump(vectors, f, indent=1, sort_keys=True)
    with open(os.path.join(OUT, "ref_net_vectors.json"), "w") as f:
        json.dump(net_vectors(), f, indent=1, sort_keys=True)


if __name__ == "__main__":
    main()
