__cellrw_ser = df['text']
try:
    import pandas as __cellrw_pd
    __cellrw_ok = isinstance(__cellrw_ser, __cellrw_pd.Series) and __cellrw_ser.dtype == object and (__cellrw_pd.api.types.infer_dtype(__cellrw_ser, skipna=False) == 'string')
except Exception:
    __cellrw_ok = False
if __cellrw_ok:
    __cellrw_res = __cellrw_ser.str.contains('needle', regex=False)
else:
    __cellrw_res = __cellrw_ser.apply(lambda x: 'needle' in x)
__cellrw_res
