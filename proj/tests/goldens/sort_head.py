__cellrw_called_on = df['A']
try:
    import pandas as __cellrw_pd
    __cellrw_ok = isinstance(__cellrw_called_on, __cellrw_pd.Series) and __cellrw_called_on.dtype.kind in 'iuf' and (not __cellrw_called_on.hasnans) and __cellrw_called_on.is_unique
except Exception:
    __cellrw_ok = False
if __cellrw_ok:
    __cellrw_res = __cellrw_called_on.nsmallest(n=5)
else:
    __cellrw_res = __cellrw_called_on.sort_values().head(n=5)
__cellrw_res
