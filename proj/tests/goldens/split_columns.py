__cellrw_ser = df['C']
try:
    import pandas as __cellrw_pd
    __cellrw_ok = isinstance(df, __cellrw_pd.DataFrame) and isinstance(__cellrw_ser, __cellrw_pd.Series) and (__cellrw_ser.dtype == object) and (__cellrw_pd.api.types.infer_dtype(__cellrw_ser, skipna=False) == 'string') and __cellrw_ser.str.contains('(', regex=False).any()
except Exception:
    __cellrw_ok = False
if __cellrw_ok:
    __cellrw_a = []
    __cellrw_b = []
    __cellrw_ls = __cellrw_ser.tolist()
    for __cellrw_it in __cellrw_ls:
        __cellrw_spl = __cellrw_it.split('(', 1)
        __cellrw_a.append(__cellrw_spl[0])
        __cellrw_b.append(__cellrw_spl[1] if len(__cellrw_spl) > 1 else None)
    df['a'] = __cellrw_pd.Series(__cellrw_a, __cellrw_ser.index)
    df['b'] = __cellrw_pd.Series(__cellrw_b, __cellrw_ser.index)
else:
    df[['a', 'b']] = __cellrw_ser.str.split('(', n=1, expand=True)
