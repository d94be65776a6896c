df['text'].str.contains('needle', regex=False)
