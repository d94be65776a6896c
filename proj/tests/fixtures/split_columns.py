df[['a', 'b']] = df['C'].str.split('(', n=1, expand=True)
